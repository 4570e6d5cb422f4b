#pragma once

#include <optional>
#include <string>
#include <vector>

namespace gibbs::cli {

struct Series {
  std::string name;
  std::vector<std::optional<double>> y;  // one per x; absent or non-positive points are skipped
};

/// Self-contained log-log line chart with a legend. Returns false (and leaves
/// no partial file behind) when nothing is plottable or the write fails.
bool write_loglog_chart(const std::string& path, const std::string& title, const std::string& x_label,
                        const std::vector<double>& x, const std::vector<Series>& series);

}  // namespace gibbs::cli
