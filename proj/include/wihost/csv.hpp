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

#include "wihost/error.hpp"
#include "wihost/model.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace wihost
{

/// Shortest decimal text that reads back to the same double.
inline std::string format_number(double value)
{
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return std::string(buf.data(), res.ptr);
}

/// Comma-separated table, LF line endings, header first. Cells are not quoted.
class CsvTable
{
public:
    explicit CsvTable(std::vector<std::string> header)
        : m_columns(header.size())
    {
        add(header);
    }

    void add(const std::vector<std::string>& cells)
    {
        if (cells.size() != m_columns) {
            throw Error(ErrorCode::IoError, "csv row has " + std::to_string(cells.size()) + " cells, expected " +
                                                std::to_string(m_columns));
        }
        for (std::size_t i = 0; i < cells.size(); ++i) {
            m_text << (i ? "," : "") << cells[i];
        }
        m_text << '\n';
    }

    void add_numbers(const std::vector<double>& values)
    {
        std::vector<std::string> cells;
        cells.reserve(values.size());
        for (double v : values) {
            cells.push_back(format_number(v));
        }
        add(cells);
    }

    std::string str() const
    {
        return m_text.str();
    }

    void write(const std::string& path) const
    {
        write_text_file(path, str());
    }

    static void write_text_file(const std::string& path, const std::string& text)
    {
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw Error(ErrorCode::IoError, "cannot open '" + path + "' for writing");
        }
        out << text;
        if (!out.flush()) {
            throw Error(ErrorCode::IoError, "write to '" + path + "' failed");
        }
    }

private:
    std::size_t m_columns;
    std::ostringstream m_text;
};

/// t,T,E,I,V rows of a trajectory.
inline CsvTable trajectory_table(const Trajectory& traj)
{
    CsvTable table({"t", "T", "E", "I", "V"});
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        const State& s = traj.states[i];
        table.add_numbers({traj.times[i], s.t_cells, s.e_cells, s.i_cells, s.virus});
    }
    return table;
}

} // namespace wihost
