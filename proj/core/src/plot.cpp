#include "advmask/plot.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <map>

#include "advmask/errors.hpp"
#include "advmask/png_io.hpp"

namespace advmask {

namespace {

// 5x7 glyphs, one byte per row, bit 4 = leftmost column.
struct Glyph {
    unsigned char rows[7];
};

const std::map<char, Glyph>& font() {
    static const std::map<char, Glyph> glyphs = {
        {'A', {{0x0E, 0x11, 0x11, 0x1F, 0x11, 0x11, 0x11}}},
        {'B', {{0x1E, 0x11, 0x11, 0x1E, 0x11, 0x11, 0x1E}}},
        {'C', {{0x0E, 0x11, 0x10, 0x10, 0x10, 0x11, 0x0E}}},
        {'D', {{0x1E, 0x11, 0x11, 0x11, 0x11, 0x11, 0x1E}}},
        {'E', {{0x1F, 0x10, 0x10, 0x1E, 0x10, 0x10, 0x1F}}},
        {'F', {{0x1F, 0x10, 0x10, 0x1E, 0x10, 0x10, 0x10}}},
        {'G', {{0x0E, 0x11, 0x10, 0x17, 0x11, 0x11, 0x0F}}},
        {'H', {{0x11, 0x11, 0x11, 0x1F, 0x11, 0x11, 0x11}}},
        {'I', {{0x0E, 0x04, 0x04, 0x04, 0x04, 0x04, 0x0E}}},
        {'J', {{0x07, 0x02, 0x02, 0x02, 0x02, 0x12, 0x0C}}},
        {'K', {{0x11, 0x12, 0x14, 0x18, 0x14, 0x12, 0x11}}},
        {'L', {{0x10, 0x10, 0x10, 0x10, 0x10, 0x10, 0x1F}}},
        {'M', {{0x11, 0x1B, 0x15, 0x15, 0x11, 0x11, 0x11}}},
        {'N', {{0x11, 0x19, 0x15, 0x13, 0x11, 0x11, 0x11}}},
        {'O', {{0x0E, 0x11, 0x11, 0x11, 0x11, 0x11, 0x0E}}},
        {'P', {{0x1E, 0x11, 0x11, 0x1E, 0x10, 0x10, 0x10}}},
        {'Q', {{0x0E, 0x11, 0x11, 0x11, 0x15, 0x12, 0x0D}}},
        {'R', {{0x1E, 0x11, 0x11, 0x1E, 0x14, 0x12, 0x11}}},
        {'S', {{0x0F, 0x10, 0x10, 0x0E, 0x01, 0x01, 0x1E}}},
        {'T', {{0x1F, 0x04, 0x04, 0x04, 0x04, 0x04, 0x04}}},
        {'U', {{0x11, 0x11, 0x11, 0x11, 0x11, 0x11, 0x0E}}},
        {'V', {{0x11, 0x11, 0x11, 0x11, 0x11, 0x0A, 0x04}}},
        {'W', {{0x11, 0x11, 0x11, 0x15, 0x15, 0x1B, 0x11}}},
        {'X', {{0x11, 0x11, 0x0A, 0x04, 0x0A, 0x11, 0x11}}},
        {'Y', {{0x11, 0x11, 0x0A, 0x04, 0x04, 0x04, 0x04}}},
        {'Z', {{0x1F, 0x01, 0x02, 0x04, 0x08, 0x10, 0x1F}}},
        {'0', {{0x0E, 0x11, 0x13, 0x15, 0x19, 0x11, 0x0E}}},
        {'1', {{0x04, 0x0C, 0x04, 0x04, 0x04, 0x04, 0x0E}}},
        {'2', {{0x0E, 0x11, 0x01, 0x02, 0x04, 0x08, 0x1F}}},
        {'3', {{0x1F, 0x02, 0x04, 0x02, 0x01, 0x11, 0x0E}}},
        {'4', {{0x02, 0x06, 0x0A, 0x12, 0x1F, 0x02, 0x02}}},
        {'5', {{0x1F, 0x10, 0x1E, 0x01, 0x01, 0x11, 0x0E}}},
        {'6', {{0x06, 0x08, 0x10, 0x1E, 0x11, 0x11, 0x0E}}},
        {'7', {{0x1F, 0x01, 0x02, 0x04, 0x08, 0x08, 0x08}}},
        {'8', {{0x0E, 0x11, 0x11, 0x0E, 0x11, 0x11, 0x0E}}},
        {'9', {{0x0E, 0x11, 0x11, 0x0F, 0x01, 0x02, 0x0C}}},
        {'.', {{0x00, 0x00, 0x00, 0x00, 0x00, 0x0C, 0x0C}}},
        {'-', {{0x00, 0x00, 0x00, 0x1F, 0x00, 0x00, 0x00}}},
        {'_', {{0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x1F}}},
        {'/', {{0x01, 0x01, 0x02, 0x04, 0x08, 0x10, 0x10}}},
        {':', {{0x00, 0x0C, 0x0C, 0x00, 0x0C, 0x0C, 0x00}}},
        {' ', {{0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00}}},
    };
    return glyphs;
}

void put_pixel(Image& canvas, int x, int y, double r, double g, double b) {
    if (x < 0 || x >= canvas.width || y < 0 || y >= canvas.height) return;
    canvas.at(y, x, 0) = r;
    canvas.at(y, x, 1) = g;
    canvas.at(y, x, 2) = b;
}

void fill_rect(Image& canvas, int x0, int y0, int x1, int y1, double r, double g, double b) {
    for (int y = std::max(0, y0); y <= std::min(canvas.height - 1, y1); ++y) {
        for (int x = std::max(0, x0); x <= std::min(canvas.width - 1, x1); ++x) {
            put_pixel(canvas, x, y, r, g, b);
        }
    }
}

void hline(Image& canvas, int x0, int x1, int y, double r, double g, double b) {
    fill_rect(canvas, x0, y, x1, y, r, g, b);
}

void vline(Image& canvas, int x, int y0, int y1, double r, double g, double b) {
    fill_rect(canvas, x, y0, x, y1, r, g, b);
}

std::string format_value(double v) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return buf;
}

// Compact perceptual-ish ramp from dark blue through teal to yellow.
void colormap(double t, double& r, double& g, double& b) {
    t = clamp01(t);
    struct Anchor {
        double t, r, g, b;
    };
    static const Anchor anchors[] = {
        {0.00, 0.267, 0.005, 0.329}, {0.25, 0.229, 0.322, 0.546}, {0.50, 0.128, 0.567, 0.551},
        {0.75, 0.369, 0.789, 0.383}, {1.00, 0.993, 0.906, 0.144},
    };
    for (size_t i = 1; i < std::size(anchors); ++i) {
        if (t <= anchors[i].t) {
            const double f = (t - anchors[i - 1].t) / (anchors[i].t - anchors[i - 1].t);
            r = anchors[i - 1].r + f * (anchors[i].r - anchors[i - 1].r);
            g = anchors[i - 1].g + f * (anchors[i].g - anchors[i - 1].g);
            b = anchors[i - 1].b + f * (anchors[i].b - anchors[i - 1].b);
            return;
        }
    }
    r = anchors[4].r;
    g = anchors[4].g;
    b = anchors[4].b;
}

}  // namespace

void draw_text(Image& canvas, int x, int y, const std::string& text, double r, double g, double b,
               int scale) {
    int cx = x;
    for (char raw : text) {
        const char c = static_cast<char>(std::toupper(static_cast<unsigned char>(raw)));
        auto it = font().find(c);
        const Glyph& glyph = it != font().end() ? it->second : font().at(' ');
        for (int gy = 0; gy < 7; ++gy) {
            for (int gx = 0; gx < 5; ++gx) {
                if (glyph.rows[gy] & (1 << (4 - gx))) {
                    fill_rect(canvas, cx + gx * scale, y + gy * scale, cx + gx * scale + scale - 1,
                              y + gy * scale + scale - 1, r, g, b);
                }
            }
        }
        cx += 6 * scale;
    }
}

void write_boxplot_png(const SimilarityReport& report, const std::string& path) {
    const std::vector<std::string> conditions = report.conditions();
    if (conditions.empty()) throw InvalidConfig("boxplot: report has no records");

    const int slot_w = 90;
    const int margin_left = 58, margin_right = 20, margin_top = 24, margin_bottom = 40;
    const int plot_h = 300;
    const int width = margin_left + slot_w * static_cast<int>(conditions.size()) + margin_right;
    const int height = margin_top + plot_h + margin_bottom;

    Image canvas(height, width, 3, 1.0);
    const double lo = -1.0, hi = 1.0;
    auto y_of = [&](double value) {
        const double t = (value - lo) / (hi - lo);
        return margin_top + static_cast<int>(std::lround((1.0 - t) * plot_h));
    };

    // Axes and horizontal grid at 0.5 steps.
    vline(canvas, margin_left - 1, margin_top, margin_top + plot_h, 0, 0, 0);
    hline(canvas, margin_left - 1, width - margin_right, margin_top + plot_h, 0, 0, 0);
    for (double tick = -1.0; tick <= 1.0 + 1e-9; tick += 0.5) {
        const int y = y_of(tick);
        hline(canvas, margin_left, width - margin_right, y, 0.9, 0.9, 0.9);
        hline(canvas, margin_left - 4, margin_left - 1, y, 0, 0, 0);
        draw_text(canvas, 8, y - 3, format_value(tick).substr(0, 4), 0, 0, 0);
    }

    for (size_t i = 0; i < conditions.size(); ++i) {
        const SimilarityAggregate agg = report.aggregate(conditions[i]);
        const int cx = margin_left + static_cast<int>(i) * slot_w + slot_w / 2;
        const int half = 24;
        const int y_q1 = y_of(agg.q1), y_q3 = y_of(agg.q3);
        const int y_med = y_of(agg.median), y_min = y_of(agg.min), y_max = y_of(agg.max);
        // Whiskers.
        vline(canvas, cx, y_max, y_q3, 0.2, 0.2, 0.2);
        vline(canvas, cx, y_q1, y_min, 0.2, 0.2, 0.2);
        hline(canvas, cx - 8, cx + 8, y_max, 0.2, 0.2, 0.2);
        hline(canvas, cx - 8, cx + 8, y_min, 0.2, 0.2, 0.2);
        // Box and median.
        fill_rect(canvas, cx - half, y_q3, cx + half, y_q1, 0.62, 0.76, 0.89);
        hline(canvas, cx - half, cx + half, y_q3, 0.15, 0.3, 0.5);
        hline(canvas, cx - half, cx + half, y_q1, 0.15, 0.3, 0.5);
        vline(canvas, cx - half, y_q3, y_q1, 0.15, 0.3, 0.5);
        vline(canvas, cx + half, y_q3, y_q1, 0.15, 0.3, 0.5);
        hline(canvas, cx - half, cx + half, y_med, 0.8, 0.2, 0.2);
        // Label (truncated to the slot).
        std::string label = conditions[i].substr(0, 12);
        const int tw = static_cast<int>(label.size()) * 6;
        draw_text(canvas, cx - tw / 2, margin_top + plot_h + 8, label, 0, 0, 0);
        draw_text(canvas, cx - 12, margin_top + plot_h + 22, format_value(agg.mean).substr(0, 5),
                  0.3, 0.3, 0.3);
    }
    write_png_rgb(path, canvas);
}

void write_heatmap_png(const TransferabilityMatrix& matrix, const std::string& path) {
    if (matrix.mask_names.empty() || matrix.model_names.empty()) {
        throw InvalidConfig("heatmap: empty matrix");
    }
    const int cell_w = 84, cell_h = 30;
    const int margin_left = 120, margin_top = 40;
    const int width = margin_left + cell_w * static_cast<int>(matrix.model_names.size()) + 16;
    const int height = margin_top + cell_h * static_cast<int>(matrix.mask_names.size()) + 16;

    Image canvas(height, width, 3, 1.0);
    for (size_t j = 0; j < matrix.model_names.size(); ++j) {
        const int x = margin_left + static_cast<int>(j) * cell_w;
        draw_text(canvas, x + 4, margin_top - 14, matrix.model_names[j].substr(0, 13), 0, 0, 0);
    }
    for (size_t i = 0; i < matrix.mask_names.size(); ++i) {
        const int y = margin_top + static_cast<int>(i) * cell_h;
        draw_text(canvas, 6, y + cell_h / 2 - 3, matrix.mask_names[i].substr(0, 18), 0, 0, 0);
        for (size_t j = 0; j < matrix.model_names.size(); ++j) {
            const int x = margin_left + static_cast<int>(j) * cell_w;
            const double v = matrix.mean_cosine[i][j];
            double r, g, b;
            colormap(0.5 * (v + 1.0), r, g, b);
            fill_rect(canvas, x, y, x + cell_w - 2, y + cell_h - 2, r, g, b);
            const double luma = 0.299 * r + 0.587 * g + 0.114 * b;
            const double tc = luma > 0.5 ? 0.0 : 1.0;
            draw_text(canvas, x + cell_w / 2 - 16, y + cell_h / 2 - 3, format_value(v), tc, tc, tc);
        }
    }
    write_png_rgb(path, canvas);
}

}  // namespace advmask
