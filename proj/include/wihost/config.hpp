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
#include "wihost/error.hpp"
#include "wihost/integrate.hpp"
#include "wihost/model.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <fstream>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <cmath>
#include <system_error>
#include <vector>

namespace wihost
{

/**
 * @brief Everything a CLI run needs: model, integrator settings, initial conditions,
 * time horizon (hours) and optional output paths.
 *
 * Text form (sections and keys; all rates per hour, times in hours):
 *
 *     [mu]          mean, amplitude
 *     [beta]        mean, amplitude
 *     [d]           mean, amplitude
 *     [scalars]     k, delta, p, c, c1, c2, angular_frequency   (e.g. 2*pi/24)
 *     [integrator]  rel_tol, abs_tol, initial_step, max_step, max_steps   (optional)
 *     [run]         horizon, initial_conditions = "T,E,I,V; T,E,I,V; ...",
 *                   csv_out, svg_out   (all optional)
 */
struct RunConfig {
    ModelParameters model;
    IntegratorConfig integrator{IntegratorConfig::simulation()};
    std::vector<State> initial_conditions;
    double horizon{};
    std::string csv_out;
    std::string svg_out;

    bool operator==(const RunConfig&) const = default;
};

namespace detail
{

inline std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

inline std::optional<double> to_number(std::string_view text)
{
    text = trim(text);
    if (!text.empty() && text.front() == '+') {
        text.remove_prefix(1);
    }
    double value{};
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
        return std::nullopt;
    }
    return value;
}

/// Accepts a plain number or the form "2*pi/<period>".
inline std::optional<double> to_frequency(std::string_view text)
{
    if (auto v = to_number(text)) {
        return v;
    }
    std::string compact;
    for (char ch : text) {
        if (ch != ' ' && ch != '\t') {
            compact.push_back(ch);
        }
    }
    constexpr std::string_view prefix = "2*pi/";
    if (compact.starts_with(prefix)) {
        if (auto period = to_number(std::string_view(compact).substr(prefix.size())); period && *period > 0.0) {
            return 2.0 * std::numbers::pi / *period;
        }
    }
    return std::nullopt;
}

inline std::vector<State> to_states(std::string_view text, const std::string& key)
{
    std::vector<State> out;
    std::string trimmed(trim(text));
    if (trimmed.size() >= 2 && trimmed.front() == '"' && trimmed.back() == '"') {
        trimmed = trimmed.substr(1, trimmed.size() - 2);
    }
    std::stringstream groups(trimmed);
    std::string group;
    while (std::getline(groups, group, ';')) {
        if (trim(group).empty()) {
            continue;
        }
        std::stringstream parts(group);
        std::string part;
        std::vector<double> values;
        while (std::getline(parts, part, ',')) {
            const auto v = to_number(part);
            if (!v) {
                throw Error(ErrorCode::ValidationError, key + ": '" + part + "' is not a number");
            }
            values.push_back(*v);
        }
        if (values.size() != 4) {
            throw Error(ErrorCode::ValidationError, key + ": each state needs 4 values T,E,I,V");
        }
        State s{values[0], values[1], values[2], values[3]};
        if (!s.nonnegative() || !s.vector().allFinite()) {
            throw Error(ErrorCode::ValidationError, key + ": states must be finite and nonnegative");
        }
        out.push_back(s);
    }
    return out;
}

} // namespace detail

/**
 * @brief Parses and validates a configuration document.
 *
 * @throws Error ParseError for syntax problems (with line number), ValidationError for missing,
 * unknown or out-of-range keys (with the key path, e.g. "d.amplitude").
 */
inline RunConfig parse_config(const std::string& text)
{
    namespace pt = boost::property_tree;
    pt::ptree tree;
    try {
        std::istringstream in(text);
        pt::read_ini(in, tree);
    }
    catch (const pt::ini_parser_error& e) {
        throw Error(ErrorCode::ParseError, "line " + std::to_string(e.line()) + ": " + e.message());
    }

    static const std::set<std::string> known{
        "mu.mean",         "mu.amplitude",       "beta.mean",         "beta.amplitude",     "d.mean",
        "d.amplitude",     "scalars.k",          "scalars.delta",     "scalars.p",          "scalars.c",
        "scalars.c1",      "scalars.c2",         "scalars.angular_frequency",               "integrator.rel_tol",
        "integrator.abs_tol", "integrator.initial_step", "integrator.max_step", "integrator.max_steps",
        "run.horizon",     "run.initial_conditions", "run.csv_out",    "run.svg_out"};
    for (const auto& [section, body] : tree) {
        if (body.empty()) {
            throw Error(ErrorCode::ValidationError, section + ": key outside of a section or empty section");
        }
        for (const auto& [key, value] : body) {
            const std::string path = section + "." + key;
            if (!known.contains(path)) {
                throw Error(ErrorCode::ValidationError, path + ": unknown key");
            }
        }
    }

    auto raw = [&](const std::string& path) -> std::optional<std::string> {
        if (auto v = tree.get_optional<std::string>(pt::ptree::path_type(path, '.'))) {
            return *v;
        }
        return std::nullopt;
    };
    auto required = [&](const std::string& path) {
        auto v = raw(path);
        if (!v) {
            throw Error(ErrorCode::ValidationError, path + ": missing required key");
        }
        return *v;
    };
    auto number = [&](const std::string& path, const std::string& text) {
        auto v = detail::to_number(text);
        if (!v) {
            throw Error(ErrorCode::ValidationError, path + ": '" + text + "' is not a number");
        }
        return *v;
    };
    auto required_number = [&](const std::string& path) {
        return number(path, required(path));
    };
    auto optional_number = [&](const std::string& path, double fallback) {
        auto v = raw(path);
        return v ? number(path, *v) : fallback;
    };

    RunConfig cfg;
    const std::string freq_text = required("scalars.angular_frequency");
    const auto omega = detail::to_frequency(freq_text);
    if (!omega) {
        throw Error(ErrorCode::ValidationError, "scalars.angular_frequency: '" + freq_text + "' is not a number");
    }
    ModelParameters& m = cfg.model;
    m.mu = {required_number("mu.mean"), required_number("mu.amplitude"), *omega};
    m.beta = {required_number("beta.mean"), required_number("beta.amplitude"), *omega};
    m.d = {required_number("d.mean"), required_number("d.amplitude"), *omega};
    m.k = required_number("scalars.k");
    m.delta = required_number("scalars.delta");
    m.p = required_number("scalars.p");
    m.c = required_number("scalars.c");
    m.c1 = required_number("scalars.c1");
    m.c2 = required_number("scalars.c2");
    m.validate();

    const IntegratorConfig defaults = IntegratorConfig::simulation();
    IntegratorConfig& ic = cfg.integrator;
    ic.rel_tol = optional_number("integrator.rel_tol", defaults.rel_tol);
    ic.abs_tol = optional_number("integrator.abs_tol", defaults.abs_tol);
    ic.initial_step = optional_number("integrator.initial_step", defaults.initial_step);
    ic.max_step = optional_number("integrator.max_step", defaults.max_step);
    const double max_steps = optional_number("integrator.max_steps", static_cast<double>(defaults.max_steps));
    if (!(max_steps >= 1.0) || max_steps != std::floor(max_steps) || max_steps > 1e15) {
        throw Error(ErrorCode::ValidationError, "integrator.max_steps: must be a positive integer");
    }
    ic.max_steps = static_cast<std::size_t>(max_steps);
    ic.validate();

    cfg.horizon = optional_number("run.horizon", 200.0 * m.period());
    if (!(cfg.horizon > 0.0) || !std::isfinite(cfg.horizon)) {
        throw Error(ErrorCode::ValidationError, "run.horizon: must be finite and > 0");
    }
    if (auto v = raw("run.initial_conditions")) {
        cfg.initial_conditions = detail::to_states(*v, "run.initial_conditions");
    }
    cfg.csv_out = raw("run.csv_out").value_or("");
    cfg.svg_out = raw("run.svg_out").value_or("");
    return cfg;
}

inline RunConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::IoError, "cannot read config file '" + path + "'");
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

/// Text form accepted by parse_config; parse_config(serialize_config(c)) == c.
inline std::string serialize_config(const RunConfig& cfg)
{
    const ModelParameters& m = cfg.model;
    const IntegratorConfig& ic = cfg.integrator;
    std::ostringstream out;
    auto coeff = [&](const char* name, const SinusoidalCoefficient& c) {
        out << "[" << name << "]\n"
            << "mean = " << format_number(c.mean) << "\n"
            << "amplitude = " << format_number(c.amplitude) << "\n\n";
    };
    coeff("mu", m.mu);
    coeff("beta", m.beta);
    coeff("d", m.d);
    out << "[scalars]\n"
        << "k = " << format_number(m.k) << "\n"
        << "delta = " << format_number(m.delta) << "\n"
        << "p = " << format_number(m.p) << "\n"
        << "c = " << format_number(m.c) << "\n"
        << "c1 = " << format_number(m.c1) << "\n"
        << "c2 = " << format_number(m.c2) << "\n"
        << "angular_frequency = " << format_number(m.angular_frequency()) << "\n\n";
    out << "[integrator]\n"
        << "rel_tol = " << format_number(ic.rel_tol) << "\n"
        << "abs_tol = " << format_number(ic.abs_tol) << "\n"
        << "initial_step = " << format_number(ic.initial_step) << "\n"
        << "max_step = " << format_number(ic.max_step) << "\n"
        << "max_steps = " << ic.max_steps << "\n\n";
    out << "[run]\n"
        << "horizon = " << format_number(cfg.horizon) << "\n";
    if (!cfg.initial_conditions.empty()) {
        out << "initial_conditions = ";
        for (std::size_t i = 0; i < cfg.initial_conditions.size(); ++i) {
            const State& s = cfg.initial_conditions[i];
            out << (i ? "; " : "") << format_number(s.t_cells) << "," << format_number(s.e_cells) << ","
                << format_number(s.i_cells) << "," << format_number(s.virus);
        }
        out << "\n";
    }
    if (!cfg.csv_out.empty()) {
        out << "csv_out = " << cfg.csv_out << "\n";
    }
    if (!cfg.svg_out.empty()) {
        out << "svg_out = " << cfg.svg_out << "\n";
    }
    return out.str();
}

} // namespace wihost
