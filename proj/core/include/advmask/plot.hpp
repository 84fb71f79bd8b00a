#pragma once

#include <string>

#include "advmask/eval.hpp"
#include "advmask/image.hpp"

namespace advmask {

/// Per-condition box-and-whisker plot of cosine similarities, written as PNG.
void write_boxplot_png(const SimilarityReport& report, const std::string& path);

/// Mask x model mean-cosine heatmap with numeric cell labels, written as PNG.
void write_heatmap_png(const TransferabilityMatrix& matrix, const std::string& path);

/// 5x7 bitmap text used by the plot rasterizer (uppercased ASCII subset).
void draw_text(Image& canvas, int x, int y, const std::string& text, double r, double g, double b,
               int scale = 1);

}  // namespace advmask
