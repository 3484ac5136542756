#include <algorithm>
#include <functional>

#include "rankstrat/dtree.hpp"
#include "svg.hpp"

namespace rankstrat {

std::string render_tree(const DecisionTree& tree) {
  const auto& nodes = tree.nodes();
  std::vector<double> x(nodes.size(), 0.0);
  int max_level = 1;
  double next_leaf = 0.0;
  // In-order leaf placement; parents sit over the midpoint of their children.
  std::function<void(int)> place = [&](int id) {
    const TreeNode& n = tree.node(id);
    max_level = std::max(max_level, n.level);
    if (n.is_leaf()) {
      x[static_cast<std::size_t>(id)] = next_leaf++;
      return;
    }
    place(n.left);
    place(n.right);
    x[static_cast<std::size_t>(id)] =
        (x[static_cast<std::size_t>(n.left)] + x[static_cast<std::size_t>(n.right)]) / 2.0;
  };
  place(0);

  const double slot = 120, row = 110, box_w = 104, box_h = 58, margin = 30;
  const double width = margin * 2 + slot * std::max(1.0, next_leaf);
  const double height = margin * 2 + row * max_level;
  auto cx = [&](int id) { return margin + slot * (x[static_cast<std::size_t>(id)] + 0.5); };
  auto cy = [&](int id) { return margin + row * (tree.node(id).level - 1) + box_h / 2; };

  svg::Document doc(width, height);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const TreeNode& n = nodes[i];
    if (n.is_leaf()) continue;
    const int id = static_cast<int>(i);
    doc.line(cx(id), cy(id) + box_h / 2, cx(n.left), cy(n.left) - box_h / 2, "#888888");
    doc.line(cx(id), cy(id) + box_h / 2, cx(n.right), cy(n.right) - box_h / 2, "#888888");
    const double lx = (cx(id) + cx(n.left)) / 2, rx = (cx(id) + cx(n.right)) / 2;
    const double my = (cy(id) + box_h / 2 + cy(n.left) - box_h / 2) / 2;
    doc.text(lx - 4, my, "<=", 10, "end", "#555555");
    doc.text(rx + 4, my, ">", 10, "start", "#555555");
  }
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const TreeNode& n = nodes[i];
    const int id = static_cast<int>(i);
    const double left = cx(id) - box_w / 2, top = cy(id) - box_h / 2;
    doc.rect(left, top, box_w, box_h, n.is_leaf() ? "#fbfbf4" : "#f4f7fb", "#444444");
    const std::string title =
        n.is_leaf() ? "class " + std::to_string(n.predicted_class())
                    : tree.feature_names()[static_cast<std::size_t>(n.feature)] + " <= " +
                          svg::num(n.threshold);
    doc.text(cx(id), top + 15, title, 11);
    const int total = n.distribution.total();
    doc.text(cx(id), top + 29, "n=" + std::to_string(total), 10, "middle", "#555555");
    // Stacked class-distribution bar.
    double bx = left + 6;
    const double bar_w = box_w - 12;
    for (int c = 1; c <= n.distribution.num_classes(); ++c) {
      const int count = n.distribution.count(c);
      if (count == 0 || total == 0) continue;
      const double w = bar_w * count / total;
      doc.rect(bx, top + 36, w, 14, svg::class_color(c));
      bx += w;
    }
  }
  return doc.finish();
}

}  // namespace rankstrat
