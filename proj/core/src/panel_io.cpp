#include "ammlab/panel_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ammlab {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream stream(line);
    while (std::getline(stream, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

[[noreturn]] void schema_error(std::size_t line_number, const std::string& what) {
    throw std::invalid_argument("panel.csv line " + std::to_string(line_number) + ": " +
                                what);
}

}  // namespace

std::string format_number(double value) {
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.17g", value);
    return buffer;
}

void write_panel_csv(std::ostream& out, const std::vector<PanelRow>& panel) {
    if (panel.empty()) throw std::invalid_argument("write_panel_csv: empty panel");
    const auto& moderators = panel.front().moderators;

    out << "market_id,period,price,treatment,baseline_price";
    for (const auto& [name, value] : moderators) out << ',' << name;
    out << '\n';
    for (const auto& row : panel) {
        if (row.moderators.size() != moderators.size())
            throw std::invalid_argument("write_panel_csv: inconsistent moderator columns");
        out << row.market_id << ',' << row.period << ',' << format_number(row.price)
            << ',' << to_string(row.treatment) << ',' << format_number(row.baseline_price);
        for (const auto& [name, unused] : moderators) {
            const auto it = row.moderators.find(name);
            if (it == row.moderators.end())
                throw std::invalid_argument("write_panel_csv: inconsistent moderator columns");
            out << ',' << format_number(it->second);
        }
        out << '\n';
    }
}

std::vector<PanelRow> read_panel_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) schema_error(1, "missing header");
    const auto header = split_csv_line(line);
    const std::vector<std::string> required = {"market_id", "period", "price",
                                               "treatment", "baseline_price"};
    if (header.size() < required.size()) schema_error(1, "too few columns");
    for (std::size_t i = 0; i < required.size(); ++i)
        if (header[i] != required[i])
            schema_error(1, "expected column '" + required[i] + "', found '" + header[i] + "'");

    std::vector<PanelRow> panel;
    std::size_t line_number = 1;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != header.size())
            schema_error(line_number, "expected " + std::to_string(header.size()) +
                                          " fields, found " + std::to_string(fields.size()));
        PanelRow row;
        try {
            row.market_id = std::stoi(fields[0]);
            row.period = std::stoi(fields[1]);
            row.price = std::stod(fields[2]);
            row.treatment = arm_from_string(fields[3]);
            row.baseline_price = std::stod(fields[4]);
            for (std::size_t c = required.size(); c < header.size(); ++c)
                row.moderators[header[c]] = std::stod(fields[c]);
        } catch (const std::invalid_argument& e) {
            schema_error(line_number, e.what());
        } catch (const std::out_of_range&) {
            schema_error(line_number, "numeric field out of range");
        }
        panel.push_back(std::move(row));
    }
    if (panel.empty()) schema_error(line_number, "no data rows");
    return panel;
}

void write_panel_csv_file(const std::string& path, const std::vector<PanelRow>& panel) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    write_panel_csv(out, panel);
}

std::vector<PanelRow> read_panel_csv_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path);
    return read_panel_csv(in);
}

}  // namespace ammlab
