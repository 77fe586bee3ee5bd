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
#include "wihost/commands.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

namespace
{

using namespace wihost;

std::vector<double> parse_values(const std::string& text)
{
    std::vector<double> values;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, ',')) {
        const auto v = wihost::detail::to_number(item);
        if (!v) {
            throw Error(ErrorCode::ValidationError, "--values: '" + item + "' is not a number");
        }
        values.push_back(*v);
    }
    if (values.empty()) {
        throw Error(ErrorCode::ValidationError, "--values: empty list");
    }
    return values;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"wihost: periodic within-host infection model (times in hours, rates per hour)"};
    app.require_subcommand(1);

    std::string config_path;
    auto add_config = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "configuration file")->required();
    };

    cli::SimulateOptions sim;
    double t_end = 0.0;
    auto* simulate = app.add_subcommand("simulate", "simulate every initial condition and write t,T,E,I,V");
    add_config(simulate);
    auto* t_end_opt = simulate->add_option("--t-end", t_end, "final time in hours (default: run.horizon)");
    simulate->add_option("--out", sim.out, "CSV path (default: run.csv_out)");
    simulate->add_option("--svg", sim.svg, "SVG time-series plot");
    simulate->add_option("--grid-step", sim.grid_step, "output spacing in hours")->capture_default_str();

    cli::R0Options r0;
    auto* r0_cmd = app.add_subcommand("r0", "basic reproduction number of the periodic model");
    add_config(r0_cmd);
    r0_cmd->add_option("--tol", r0.tol, "bisection tolerance")->capture_default_str();

    cli::OrbitOptions orbit;
    auto* orbit_cmd = app.add_subcommand("orbit", "locate the endemic periodic orbit and its multipliers");
    add_config(orbit_cmd);
    orbit_cmd->add_option("--transient", orbit.transient, "warm-up time in hours")->capture_default_str();
    orbit_cmd->add_option("--newton-tol", orbit.newton_tol, "shooting residual tolerance")->capture_default_str();
    orbit_cmd->add_option("--out", orbit.out, "CSV of one period (default: run.csv_out)");
    orbit_cmd->add_option("--svg-prefix", orbit.svg_prefix, "write <prefix>_I_V.svg, _T_V.svg, _E_V.svg");

    cli::SweepOptions sw;
    std::string values_text;
    auto* sweep_cmd = app.add_subcommand("sweep", "R0 and long-run regime over a list of parameter values");
    add_config(sweep_cmd);
    sweep_cmd->add_option("--param", sw.param, "e.g. beta.mean, c, scalars.delta")->required();
    sweep_cmd->add_option("--values", values_text, "comma separated values")->required();
    sweep_cmd->add_option("--out", sw.out, "CSV path (default: run.csv_out)");

    auto* validate = app.add_subcommand("validate", "check positivity and boundedness of the trajectories");
    add_config(validate);

    try {
        app.parse(argc, argv);
    }
    catch (const CLI::Success& e) {
        return app.exit(e);
    }
    catch (const CLI::ParseError& e) {
        std::cerr << "error: UsageError: " << e.what() << "\n";
        return cli::ConfigError;
    }

    return cli::guarded([&] {
        const RunConfig cfg = load_config(config_path);
        if (simulate->parsed()) {
            if (*t_end_opt) {
                sim.t_end = t_end;
            }
            return cli::cmd_simulate(cfg, sim);
        }
        if (r0_cmd->parsed()) {
            return cli::cmd_r0(cfg, r0);
        }
        if (orbit_cmd->parsed()) {
            return cli::cmd_orbit(cfg, orbit);
        }
        if (sweep_cmd->parsed()) {
            sw.values = parse_values(values_text);
            return cli::cmd_sweep(cfg, sw);
        }
        return cli::cmd_validate(cfg);
    });
}
