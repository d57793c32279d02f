// Copyright 2026 The catgrow Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Small rasterizer for heat maps and line plots, written out through libpng.

#pragma once

#include <png.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "catgrow/config.hpp"
#include "catgrow/phase_space.hpp"

namespace catgrow::render {

struct Image {
    int width = 0, height = 0;
    std::vector<uint8_t> rgb;

    Image(int w, int h, uint8_t fill = 255) : width(w), height(h), rgb(size_t(w) * h * 3, fill) {}
    void set(int x, int y, std::array<uint8_t, 3> c) {
        if (x < 0 || y < 0 || x >= width || y >= height) return;
        size_t k = (size_t(y) * width + x) * 3;
        rgb[k] = c[0];
        rgb[k + 1] = c[1];
        rgb[k + 2] = c[2];
    }
};

/// Piecewise-linear approximation of the viridis map, t in [0, 1].
inline std::array<uint8_t, 3> viridis(double t) {
    static const double stops[][3] = {{68, 1, 84},    {72, 40, 120},  {62, 74, 137},  {49, 104, 142},
                                      {38, 130, 142}, {31, 158, 137}, {53, 183, 121}, {109, 205, 89},
                                      {180, 222, 44}, {253, 231, 37}};
    const int n = 10;
    t = std::clamp(t, 0.0, 1.0) * (n - 1);
    int i = std::min((int)t, n - 2);
    double f = t - i;
    std::array<uint8_t, 3> c;
    for (int k = 0; k < 3; ++k) c[k] = (uint8_t)std::lround(stops[i][k] + f * (stops[i + 1][k] - stops[i][k]));
    return c;
}

inline void write_png(const std::string &path, const Image &img) {
    png_image im{};
    im.version = PNG_IMAGE_VERSION;
    im.width = (png_uint_32)img.width;
    im.height = (png_uint_32)img.height;
    im.format = PNG_FORMAT_RGB;
    if (!png_image_write_to_file(&im, path.c_str(), 0, img.rgb.data(), img.width * 3, nullptr)) {
        throw IoError("cannot write " + path + ": " + im.message);
    }
}

/// P runs upward, X to the right; one pixel per grid point, scaled up to
/// at least 400 pixels on the short side.
inline Image heatmap(const Field &f) {
    int short_side = std::max(1, std::min(f.grid.nx, f.grid.np));
    int scale = std::max(1, (400 + short_side - 1) / short_side);
    Image img(f.grid.nx * scale, f.grid.np * scale);
    double lo = f.min(), hi = *std::max_element(f.values.begin(), f.values.end());
    double span = hi > lo ? hi - lo : 1;
    for (int i = 0; i < f.grid.nx; ++i)
        for (int j = 0; j < f.grid.np; ++j) {
            auto c = viridis((f.at(i, j) - lo) / span);
            for (int a = 0; a < scale; ++a)
                for (int b = 0; b < scale; ++b) img.set(i * scale + a, (f.grid.np - 1 - j) * scale + b, c);
        }
    return img;
}

struct Series {
    std::vector<double> x, y;
};

/// Line plot of several series on shared axes, colored along the palette.
inline Image line_plot(const std::vector<Series> &series, int width = 640, int height = 400) {
    Image img(width, height);
    double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
    for (const auto &s : series)
        for (size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.y[i])) continue;
            xmin = std::min(xmin, s.x[i]);
            xmax = std::max(xmax, s.x[i]);
            ymin = std::min(ymin, s.y[i]);
            ymax = std::max(ymax, s.y[i]);
        }
    if (!(xmax > xmin)) xmax = xmin + 1;
    if (!(ymax > ymin)) ymax = ymin + 1;
    const int m = 30;
    auto px = [&](double x) { return m + (int)std::lround((x - xmin) / (xmax - xmin) * (width - 2 * m)); };
    auto py = [&](double y) { return height - m - (int)std::lround((y - ymin) / (ymax - ymin) * (height - 2 * m)); };
    const std::array<uint8_t, 3> black{0, 0, 0};
    for (int x = m; x <= width - m; ++x) {
        img.set(x, height - m, black);
        img.set(x, m, black);
    }
    for (int y = m; y <= height - m; ++y) {
        img.set(m, y, black);
        img.set(width - m, y, black);
    }
    if (ymin < 0 && ymax > 0)
        for (int x = m; x <= width - m; x += 4) img.set(x, py(0), {128, 128, 128});
    auto line = [&](int x0, int y0, int x1, int y1, std::array<uint8_t, 3> c) {
        int dx = std::abs(x1 - x0), dy = -std::abs(y1 - y0), sx = x0 < x1 ? 1 : -1, sy = y0 < y1 ? 1 : -1;
        int err = dx + dy;
        while (true) {
            for (int a = -1; a <= 1; ++a) img.set(x0, y0 + a, c);
            if (x0 == x1 && y0 == y1) break;
            int e2 = 2 * err;
            if (e2 >= dy) {
                err += dy;
                x0 += sx;
            }
            if (e2 <= dx) {
                err += dx;
                y0 += sy;
            }
        }
    };
    for (size_t k = 0; k < series.size(); ++k) {
        auto c = viridis(series.size() > 1 ? 0.9 * k / (series.size() - 1) : 0.0);
        const auto &s = series[k];
        for (size_t i = 0; i + 1 < s.x.size(); ++i) {
            if (!std::isfinite(s.y[i]) || !std::isfinite(s.y[i + 1])) continue;
            line(px(s.x[i]), py(s.y[i]), px(s.x[i + 1]), py(s.y[i + 1]), c);
        }
        for (size_t i = 0; i < s.x.size(); ++i)
            if (std::isfinite(s.y[i]))
                for (int a = -3; a <= 3; ++a)
                    for (int b = -3; b <= 3; ++b) img.set(px(s.x[i]) + a, py(s.y[i]) + b, c);
    }
    return img;
}

}  // namespace catgrow::render
