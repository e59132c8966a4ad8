#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "ammlab/experiment.hpp"

namespace ammlab {

// Serialises doubles with 17 significant digits so re-parsing is lossless.
std::string format_number(double value);

// Panel CSV schema: market_id,period,price,treatment,baseline_price followed
// by one column per moderator (sorted by name). Moderators must agree across
// rows. Parse errors carry 1-based line numbers.
void write_panel_csv(std::ostream& out, const std::vector<PanelRow>& panel);
std::vector<PanelRow> read_panel_csv(std::istream& in);

void write_panel_csv_file(const std::string& path, const std::vector<PanelRow>& panel);
std::vector<PanelRow> read_panel_csv_file(const std::string& path);

}  // namespace ammlab
