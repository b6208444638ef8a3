#pragma once

#include "pcg/experiments.hpp"
#include "pcg/metric.hpp"

#include <string>

namespace pcg {

inline constexpr const char* kReportSchema = "v1";

/// 17 significant digits; "nan", "inf", "-inf" for non-finite values.
std::string format_number(double x);
/// RFC 4180 field quoting.
std::string csv_field(const std::string& s);

/// Header "instance_id,lhs,rhs,ratio,stderr", one CRLF-terminated line per row.
std::string report_csv(const ExperimentReport& report);
/// Schema "v1"; numbers carry the same decimal strings as the CSV (non-finite as null).
std::string report_json(const ExperimentReport& report);
/// x = instance index, y = ratio.
std::string report_plot_csv(const ExperimentReport& report);

/// Shape matrix as its lower triangle, row by row.
std::string ellipsoid_json(const Body& ellipsoid);
std::string certificate_json(const CoverCertificate& cert);

}  // namespace pcg
