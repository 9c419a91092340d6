#include "sirsn/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

namespace sirsn::io {

std::string format_double(double x) {
    if (!std::isfinite(x)) return "null";
    if (x == 0) return std::signbit(x) ? "-0.0" : "0.0";
    std::string s = fmt::format("{:.17g}", x);
    if (s.find_first_of(".eE") == std::string::npos) s += ".0";
    return s;
}

namespace {

bool is_flat(const nlohmann::json& j) {
    for (const auto& v : j)
        if (v.is_structured() && !v.empty()) return false;
    return true;
}

void emit(const nlohmann::json& j, std::string& out, int indent, int depth) {
    using T = nlohmann::json::value_t;
    switch (j.type()) {
        case T::null: out += "null"; return;
        case T::boolean: out += j.get<bool>() ? "true" : "false"; return;
        case T::number_integer: out += std::to_string(j.get<std::int64_t>()); return;
        case T::number_unsigned: out += std::to_string(j.get<std::uint64_t>()); return;
        case T::number_float: out += format_double(j.get<double>()); return;
        case T::string: out += nlohmann::json(j.get<std::string>()).dump(); return;
        default: break;
    }
    const bool obj = j.is_object();
    out += obj ? '{' : '[';
    if (j.empty()) {
        out += obj ? '}' : ']';
        return;
    }
    const bool inline_children = indent <= 0 || is_flat(j);
    std::string pad = inline_children ? "" : "\n" + std::string((depth + 1) * indent, ' ');
    bool first = true;
    auto sep = [&] {
        if (!first) out += ',';
        out += pad;
        first = false;
    };
    if (obj) {
        for (auto it = j.begin(); it != j.end(); ++it) {
            sep();
            out += nlohmann::json(it.key()).dump();
            out += ':';
            emit(it.value(), out, indent, depth + 1);
        }
    } else {
        for (const auto& v : j) {
            sep();
            emit(v, out, indent, depth + 1);
        }
    }
    if (!inline_children) out += "\n" + std::string(depth * indent, ' ');
    out += obj ? '}' : ']';
}

}  // namespace

std::string dump_json(const nlohmann::json& j, int indent) {
    std::string out;
    emit(j, out, indent, 0);
    out += '\n';
    return out;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    namespace fs = std::filesystem;
    std::error_code ec;
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path(), ec);
        if (ec) throw IoError(fmt::format("cannot create directory {}: {}", path.parent_path().string(), ec.message()));
    }
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw IoError(fmt::format("cannot open {} for writing", tmp.string()));
        f.write(content.data(), static_cast<std::streamsize>(content.size()));
        f.flush();
        if (!f) throw IoError(fmt::format("write failed for {}", tmp.string()));
    }
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw IoError(fmt::format("cannot move output into place at {}", path.string()));
    }
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError(fmt::format("cannot open {} for reading", path.string()));
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

Svg::Svg(double cx, double cy, double half_width, int pixels)
    : cx_(cx), cy_(cy), half_(half_width > 0 ? half_width : 1.0), scale_(pixels / (2 * half_)), px_(pixels) {}

double Svg::sx(double x) const { return (x - (cx_ - half_)) * scale_; }
double Svg::sy(double y) const { return ((cy_ + half_) - y) * scale_; }

void Svg::line(double x1, double y1, double x2, double y2, const std::string& stroke, double width, bool dashed) {
    body_ += fmt::format(R"(<line x1="{:.3f}" y1="{:.3f}" x2="{:.3f}" y2="{:.3f}" stroke="{}" stroke-width="{:.3g}")",
                         sx(x1), sy(y1), sx(x2), sy(y2), stroke, width);
    if (dashed) body_ += R"( stroke-dasharray="4 3")";
    body_ += "/>\n";
}

void Svg::circle(double x, double y, double r, const std::string& fill) {
    body_ += fmt::format(R"(<circle cx="{:.3f}" cy="{:.3f}" r="{:.3g}" fill="{}"/>)", sx(x), sy(y), r, fill);
    body_ += "\n";
}

void Svg::text(double x, double y, const std::string& s, double size) {
    std::string esc;
    for (char c : s) {
        if (c == '<') esc += "&lt;";
        else if (c == '>') esc += "&gt;";
        else if (c == '&') esc += "&amp;";
        else esc += c;
    }
    body_ += fmt::format(R"(<text x="{:.3f}" y="{:.3f}" font-size="{:.3g}" font-family="sans-serif">{}</text>)",
                         sx(x), sy(y), size, esc);
    body_ += "\n";
}

std::string Svg::str() const {
    return fmt::format(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{0}\" viewBox=\"0 0 {0} {0}\">\n"
        "<rect x=\"0\" y=\"0\" width=\"{0}\" height=\"{0}\" fill=\"white\"/>\n{1}</svg>\n",
        px_, body_);
}

std::string speed_stroke(double v, double v_floor, double v_top) {
    double t = 0.0;
    if (v_top > v_floor && v > v_floor) t = std::log(v / v_floor) / std::log(v_top / v_floor);
    t = std::clamp(t, 0.0, 1.0);
    int g = static_cast<int>(std::lround(215 - 215 * t));
    return fmt::format("#{0:02x}{0:02x}{0:02x}", g);
}

}  // namespace sirsn::io
