#include "kinoforge/svg.hpp"

#include <fmt/format.h>

namespace kinoforge::svg {

Document::Document(double width, double height, double scale) : width_(width), height_(height), scale_(scale) {}

void Document::rect(double x, double y, double w, double h, const std::string& fill) {
    body_ += fmt::format("<rect x=\"{:.3f}\" y=\"{:.3f}\" width=\"{:.3f}\" height=\"{:.3f}\" fill=\"{}\"/>\n", x, y, w,
                         h, fill);
}

void Document::line(double x0, double y0, double x1, double y1, const std::string& stroke, double width) {
    body_ += fmt::format(
        "<line x1=\"{:.3f}\" y1=\"{:.3f}\" x2=\"{:.3f}\" y2=\"{:.3f}\" stroke=\"{}\" stroke-width=\"{:.3f}\"/>\n", x0,
        y0, x1, y1, stroke, width);
}

void Document::polyline(const std::vector<Point>& pts, const std::string& stroke, double width) {
    if (pts.empty()) return;
    std::string coords;
    for (const auto& p : pts) coords += fmt::format("{:.3f},{:.3f} ", p.x(), p.y());
    coords.pop_back();
    body_ += fmt::format("<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"{:.3f}\"/>\n", coords,
                         stroke, width);
}

void Document::circle(double cx, double cy, double r, const std::string& fill) {
    body_ += fmt::format("<circle cx=\"{:.3f}\" cy=\"{:.3f}\" r=\"{:.3f}\" fill=\"{}\"/>\n", cx, cy, r, fill);
}

void Document::arrow(const Point& from, const Point& to, const std::string& stroke, double width) {
    line(from.x(), from.y(), to.x(), to.y(), stroke, width);
    const Eigen::Vector2d d = to - from;
    const double len = d.norm();
    if (len < 1e-9) return;
    const Eigen::Vector2d u = d / len;
    const Eigen::Vector2d n(-u.y(), u.x());
    const double head = std::min(0.35, 0.4 * len);
    const Point a = to - head * u + 0.5 * head * n;
    const Point b = to - head * u - 0.5 * head * n;
    body_ += fmt::format("<polygon points=\"{:.3f},{:.3f} {:.3f},{:.3f} {:.3f},{:.3f}\" fill=\"{}\"/>\n", to.x(),
                         to.y(), a.x(), a.y(), b.x(), b.y(), stroke);
}

void Document::text(double x, double y, const std::string& content, double size, const std::string& anchor) {
    body_ += fmt::format("<text x=\"{:.3f}\" y=\"{:.3f}\" font-size=\"{:.1f}\" text-anchor=\"{}\">{}</text>\n", x, y,
                         size, anchor, escape(content));
}

std::string Document::str() const {
    return fmt::format(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0f}\" height=\"{:.0f}\" viewBox=\"0 0 {:.3f} {:.3f}\">\n"
        "{}</svg>\n",
        width_ * scale_, height_ * scale_, width_, height_, body_);
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace kinoforge::svg
