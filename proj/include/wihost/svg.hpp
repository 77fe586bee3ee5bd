/*
* Copyright (C) 2026 The wihost Authors
*
* Licensed under the Apache License, Version 2.0 (the "License");
* you may not use this file except in compliance with the License.
* You may obtain a copy of the License at
*
*     http://www.apache.org/licenses/LICENSE-2.0
*
* Unless required by applicable law or agreed to in writing, software
* distributed under the License is distributed on an "AS IS" BASIS,
* WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
* See the License for the specific language governing permissions and
* limitations under the License.
*/
#pragma once

#include "wihost/csv.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

namespace wihost
{
namespace svg
{

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

struct Panel {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<Series> series;
};

inline const std::vector<std::string>& palette()
{
    static const std::vector<std::string> colors{"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                                 "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};
    return colors;
}

namespace detail
{

inline std::string escape(const std::string& text)
{
    std::string out;
    for (char ch : text) {
        switch (ch) {
        case '&':
            out += "&amp;";
            break;
        case '<':
            out += "&lt;";
            break;
        case '>':
            out += "&gt;";
            break;
        case '"':
            out += "&quot;";
            break;
        default:
            out += ch;
        }
    }
    return out;
}

inline std::string coord(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

inline std::string tick_label(double v, double step)
{
    if (std::abs(v) < 1e-12 * std::max(1.0, step)) {
        v = 0.0;
    }
    char buf[32];
    if (std::abs(v) >= 1e5 || (v != 0.0 && std::abs(v) < 1e-3)) {
        std::snprintf(buf, sizeof buf, "%.2g", v);
    }
    else {
        const int decimals = std::clamp(static_cast<int>(-std::floor(std::log10(step))), 0, 6);
        std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    }
    return buf;
}

/// 1, 2 or 5 times a power of ten, close to range / target.
inline double nice_step(double range, int target = 5)
{
    const double raw = range / target;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    const double frac = raw / mag;
    const double nice = frac < 1.5 ? 1.0 : frac < 3.5 ? 2.0 : frac < 7.5 ? 5.0 : 10.0;
    return nice * mag;
}

struct Axis {
    double lo;
    double hi;
    double step;
};

inline Axis make_axis(double lo, double hi)
{
    if (!(lo < hi)) {
        const double pad = lo == 0.0 ? 1.0 : 0.1 * std::abs(lo);
        lo -= pad;
        hi += pad;
    }
    const double step = nice_step(hi - lo);
    return {std::floor(lo / step) * step, std::ceil(hi / step) * step, step};
}

} // namespace detail

/// Draws one panel into the box (x0, y0, w, h) of an enclosing document.
inline std::string render_panel(const Panel& panel, double x0, double y0, double w, double h)
{
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (const Series& s : panel.series) {
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (std::isfinite(s.x[i]) && std::isfinite(s.y[i])) {
                xmin = std::min(xmin, s.x[i]);
                xmax = std::max(xmax, s.x[i]);
                ymin = std::min(ymin, s.y[i]);
                ymax = std::max(ymax, s.y[i]);
            }
        }
    }
    if (!std::isfinite(xmin)) {
        xmin = ymin = 0.0;
        xmax = ymax = 1.0;
    }
    const detail::Axis ax = detail::make_axis(xmin, xmax);
    const detail::Axis ay = detail::make_axis(ymin, ymax);

    const double left = x0 + 70.0, right = x0 + w - 20.0;
    const double top = y0 + 35.0, bottom = y0 + h - 50.0;
    auto px = [&](double v) {
        return left + (v - ax.lo) / (ax.hi - ax.lo) * (right - left);
    };
    auto py = [&](double v) {
        return bottom - (v - ay.lo) / (ay.hi - ay.lo) * (bottom - top);
    };

    std::ostringstream out;
    using detail::coord;
    out << "<g>\n";
    out << "<text x=\"" << coord((left + right) / 2) << "\" y=\"" << coord(y0 + 20.0)
        << "\" text-anchor=\"middle\" font-size=\"14\">" << detail::escape(panel.title) << "</text>\n";
    out << "<rect x=\"" << coord(left) << "\" y=\"" << coord(top) << "\" width=\"" << coord(right - left)
        << "\" height=\"" << coord(bottom - top) << "\" fill=\"none\" stroke=\"#000\"/>\n";

    for (int i = 0;; ++i) {
        const double v = ax.lo + i * ax.step;
        if (v > ax.hi + 1e-9 * ax.step) {
            break;
        }
        const double x = px(v);
        out << "<line x1=\"" << coord(x) << "\" y1=\"" << coord(bottom) << "\" x2=\"" << coord(x) << "\" y2=\""
            << coord(bottom + 5) << "\" stroke=\"#000\"/>\n";
        out << "<text x=\"" << coord(x) << "\" y=\"" << coord(bottom + 18)
            << "\" text-anchor=\"middle\" font-size=\"11\">" << detail::tick_label(v, ax.step) << "</text>\n";
    }
    for (int i = 0;; ++i) {
        const double v = ay.lo + i * ay.step;
        if (v > ay.hi + 1e-9 * ay.step) {
            break;
        }
        const double y = py(v);
        out << "<line x1=\"" << coord(left - 5) << "\" y1=\"" << coord(y) << "\" x2=\"" << coord(left) << "\" y2=\""
            << coord(y) << "\" stroke=\"#000\"/>\n";
        out << "<text x=\"" << coord(left - 8) << "\" y=\"" << coord(y + 4)
            << "\" text-anchor=\"end\" font-size=\"11\">" << detail::tick_label(v, ay.step) << "</text>\n";
    }
    out << "<text x=\"" << coord((left + right) / 2) << "\" y=\"" << coord(y0 + h - 12)
        << "\" text-anchor=\"middle\" font-size=\"12\">" << detail::escape(panel.x_label) << "</text>\n";
    out << "<text transform=\"translate(" << coord(x0 + 16) << "," << coord((top + bottom) / 2)
        << ") rotate(-90)\" text-anchor=\"middle\" font-size=\"12\">" << detail::escape(panel.y_label)
        << "</text>\n";

    const auto& colors = palette();
    for (std::size_t k = 0; k < panel.series.size(); ++k) {
        const Series& s = panel.series[k];
        const std::string& color = colors[k % colors.size()];
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (std::isfinite(s.x[i]) && std::isfinite(s.y[i])) {
                out << (i ? " " : "") << coord(px(s.x[i])) << "," << coord(py(s.y[i]));
            }
        }
        out << "\"/>\n";
        if (!s.label.empty()) {
            const double ly = top + 14.0 + 15.0 * k;
            out << "<line x1=\"" << coord(right - 140) << "\" y1=\"" << coord(ly - 4) << "\" x2=\""
                << coord(right - 120) << "\" y2=\"" << coord(ly - 4) << "\" stroke=\"" << color
                << "\" stroke-width=\"2\"/>\n";
            out << "<text x=\"" << coord(right - 115) << "\" y=\"" << coord(ly) << "\" font-size=\"11\">"
                << detail::escape(s.label) << "</text>\n";
        }
    }
    out << "</g>\n";
    return out.str();
}

/// Self-contained document with the panels laid out row-major in `columns` columns.
inline std::string render(const std::vector<Panel>& panels, int columns = 1, double panel_w = 480.0,
                          double panel_h = 340.0)
{
    columns = std::max(1, columns);
    const int rows = (static_cast<int>(panels.size()) + columns - 1) / columns;
    const double width = columns * panel_w, height = std::max(1, rows) * panel_h;
    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << detail::coord(width) << "\" height=\""
        << detail::coord(height) << "\" viewBox=\"0 0 " << detail::coord(width) << " " << detail::coord(height)
        << "\" font-family=\"sans-serif\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"#fff\"/>\n";
    for (std::size_t i = 0; i < panels.size(); ++i) {
        const int r = static_cast<int>(i) / columns, c = static_cast<int>(i) % columns;
        out << render_panel(panels[i], c * panel_w, r * panel_h, panel_w, panel_h);
    }
    out << "</svg>\n";
    return out.str();
}

inline void write(const std::string& path, const std::vector<Panel>& panels, int columns = 1)
{
    CsvTable::write_text_file(path, render(panels, columns));
}

} // namespace svg
} // namespace wihost
