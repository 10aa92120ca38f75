#pragma once

#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ppfc/controllability.hpp"
#include "ppfc/sim.hpp"

namespace ppfc {

/// Shortest decimal that reads back to the same double; "nan"/"inf" otherwise.
std::string format_double(double value);

/// Header t,e1..en,lo1..lon,hi1..hin,s1..sn,u1..um,ua1..uam,th1..thN.
std::vector<std::string> csv_columns(std::size_t n, std::size_t m, std::size_t N);

/// One row per logged sample, LF line endings. Unbounded funnel edges are
/// written as "unbounded" / "-unbounded".
void write_csv(std::ostream& out, const RunRecord& record);

void write_summary(std::ostream& out, const RunRecord& record);
nlohmann::json summary_json(const RunRecord& record);

/// Error against its funnel for one channel, as a standalone SVG document.
void write_svg(std::ostream& out, const RunRecord& record, std::size_t channel);

void write_check_report(std::ostream& out, const std::string& name, const SweepReport& report);
nlohmann::json check_report_json(const std::string& name, const SweepReport& report);

}  // namespace ppfc
