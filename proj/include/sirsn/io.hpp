#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include <json.hpp>

namespace sirsn::io {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Compact JSON with every floating-point number written to 17 significant digits.
std::string dump_json(const nlohmann::json& j, int indent = 1);
std::string format_double(double x);

// Write via a temporary sibling and rename; throws IoError naming the path.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

// Minimal SVG builder over a square world-coordinate view.
class Svg {
public:
    Svg(double cx, double cy, double half_width, int pixels = 800);
    void line(double x1, double y1, double x2, double y2, const std::string& stroke, double width,
              bool dashed = false);
    void circle(double x, double y, double r, const std::string& fill);
    void text(double x, double y, const std::string& s, double size);
    std::string str() const;

private:
    double cx_, cy_, half_, scale_;
    int px_;
    std::string body_;
    double sx(double x) const;
    double sy(double y) const;
};

// Grey level for a speed: darker for faster, logarithmic in v / v_floor, clamped.
std::string speed_stroke(double v, double v_floor, double v_top);

}  // namespace sirsn::io
