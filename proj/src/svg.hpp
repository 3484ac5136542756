#pragma once

// Minimal deterministic SVG builder shared by the chart and tree renderers.

#include <charconv>
#include <string>
#include <string_view>

namespace rankstrat::svg {

inline std::string num(double v, int decimals = 2) {
  char buf[128];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, decimals);
  std::string s(buf, ptr);
  if (s.size() > 1 && s[0] == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  return s;
}

inline std::string escape(std::string_view text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

class Document {
 public:
  Document(double width, double height) {
    body_ = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
            "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + num(width, 0) +
            "\" height=\"" + num(height, 0) + "\" viewBox=\"0 0 " + num(width, 0) + " " +
            num(height, 0) + "\" font-family=\"Helvetica, Arial, sans-serif\">\n";
    rect(0, 0, width, height, "#ffffff");
  }

  void rect(double x, double y, double w, double h, std::string_view fill,
            std::string_view stroke = "none") {
    body_ += "<rect x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" + num(w) + "\" height=\"" +
             num(h) + "\" fill=\"" + std::string(fill) + "\" stroke=\"" + std::string(stroke) +
             "\"/>\n";
  }

  void line(double x1, double y1, double x2, double y2, std::string_view stroke,
            double width = 1.0, std::string_view dash = "") {
    body_ += "<line x1=\"" + num(x1) + "\" y1=\"" + num(y1) + "\" x2=\"" + num(x2) + "\" y2=\"" +
             num(y2) + "\" stroke=\"" + std::string(stroke) + "\" stroke-width=\"" + num(width) + "\"";
    if (!dash.empty()) body_ += " stroke-dasharray=\"" + std::string(dash) + "\"";
    body_ += "/>\n";
  }

  void circle(double cx, double cy, double r, std::string_view fill, std::string_view stroke) {
    body_ += "<circle cx=\"" + num(cx) + "\" cy=\"" + num(cy) + "\" r=\"" + num(r) + "\" fill=\"" +
             std::string(fill) + "\" stroke=\"" + std::string(stroke) + "\"/>\n";
  }

  void text(double x, double y, std::string_view content, double size = 12,
            std::string_view anchor = "middle", std::string_view fill = "#222222") {
    body_ += "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" font-size=\"" + num(size, 0) +
             "\" text-anchor=\"" + std::string(anchor) + "\" fill=\"" + std::string(fill) + "\">" +
             escape(content) + "</text>\n";
  }

  std::string finish() const { return body_ + "</svg>\n"; }

 private:
  std::string body_;
};

/// Fixed categorical palette for class indices (1-based).
inline std::string_view class_color(int cls) {
  static constexpr std::string_view kColors[] = {"#f2c12e", "#63b7e6", "#5dbb63", "#f28c38",
                                                 "#a77bd4", "#d45d79", "#7f7f7f", "#2f9c95"};
  return kColors[static_cast<std::size_t>(cls - 1) % (sizeof kColors / sizeof kColors[0])];
}

}  // namespace rankstrat::svg
