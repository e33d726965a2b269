#pragma once

#include <string>
#include <vector>

#include "kinoforge/dynamics.hpp"

namespace kinoforge::svg {

/// Minimal SVG builder. Coordinates are in user units; the y axis points down
/// as in the grid (row index grows downwards).
class Document {
public:
    Document(double width, double height, double scale = 1.0);

    void rect(double x, double y, double w, double h, const std::string& fill);
    void line(double x0, double y0, double x1, double y1, const std::string& stroke, double width);
    void polyline(const std::vector<Point>& pts, const std::string& stroke, double width);
    void circle(double cx, double cy, double r, const std::string& fill);
    void arrow(const Point& from, const Point& to, const std::string& stroke, double width);
    void text(double x, double y, const std::string& content, double size = 10.0, const std::string& anchor = "start");
    void raw(const std::string& element) { body_ += element; }

    std::string str() const;

private:
    double width_;
    double height_;
    double scale_;
    std::string body_;
};

std::string escape(const std::string& s);

}  // namespace kinoforge::svg
