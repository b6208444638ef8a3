#include "pcg/report.hpp"

#include "pcg/bodies.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include <cmath>

namespace pcg {

namespace {

std::string quote(const std::string& s) { return nlohmann::json(s).dump(); }

std::string json_number(double x) { return std::isfinite(x) ? format_number(x) : "null"; }

std::string vector_json(const Vector& v) {
    std::string out = "[";
    for (int i = 0; i < v.size(); ++i) {
        if (i > 0) out += ",";
        out += json_number(v(i));
    }
    return out + "]";
}

}  // namespace

std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    return fmt::format("{:.17g}", x);
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string report_csv(const ExperimentReport& report) {
    std::string out = "instance_id,lhs,rhs,ratio,stderr\r\n";
    for (const auto& r : report.rows) {
        out += fmt::format("{},{},{},{},{}\r\n", csv_field(r.instance_id), format_number(r.lhs), format_number(r.rhs),
                           format_number(r.ratio), format_number(r.std_error));
    }
    return out;
}

std::string report_plot_csv(const ExperimentReport& report) {
    std::string out = "x,y\r\n";
    for (std::size_t i = 0; i < report.rows.size(); ++i) {
        out += fmt::format("{},{}\r\n", i, format_number(report.rows[i].ratio));
    }
    return out;
}

std::string report_json(const ExperimentReport& report) {
    const auto& s = report.summary;
    std::string out = "{\n";
    out += fmt::format("  \"schema\": {},\n", quote(kReportSchema));
    out += fmt::format("  \"name\": {},\n", quote(report.name));
    out += fmt::format("  \"dimension\": {},\n", report.dimension);
    out += fmt::format("  \"p\": {},\n", json_number(report.p));
    out += fmt::format("  \"seed\": {},\n", report.seed);
    out += fmt::format("  \"config_hash\": {},\n", quote(report.config_hash));
    out += "  \"instances\": [";
    for (std::size_t i = 0; i < report.rows.size(); ++i) {
        const auto& r = report.rows[i];
        out += i == 0 ? "\n" : ",\n";
        out += fmt::format("    {{\"instance_id\": {}, \"inputs\": {}, \"lhs\": {}, \"rhs\": {}, \"ratio\": {}, \"stderr\": {}",
                           quote(r.instance_id), quote(r.descriptor), json_number(r.lhs), json_number(r.rhs),
                           json_number(r.ratio), json_number(r.std_error));
        out += ", \"extras\": {";
        for (std::size_t k = 0; k < r.extras.size(); ++k) {
            if (k > 0) out += ", ";
            out += fmt::format("{}: {}", quote(r.extras[k].first), json_number(r.extras[k].second));
        }
        out += "}";
        if (!r.error.empty()) out += fmt::format(", \"error\": {}", quote(r.error));
        out += "}";
    }
    out += report.rows.empty() ? "],\n" : "\n  ],\n";
    out += fmt::format(
        "  \"summary\": {{\"min\": {}, \"max\": {}, \"mean\": {}, \"fitted_constant\": {}, \"fitted_rule\": {}, "
        "\"failed\": {}}},\n",
        json_number(s.min_ratio), json_number(s.max_ratio), json_number(s.mean_ratio), json_number(s.fitted_constant),
        quote(s.fitted_rule), s.failed);
    out += "  \"violations\": [";
    for (std::size_t i = 0; i < report.violations.size(); ++i) {
        if (i > 0) out += ", ";
        out += quote(report.violations[i]);
    }
    out += "]\n}\n";
    return out;
}

std::string ellipsoid_json(const Body& ellipsoid) {
    const auto a = ellipsoid_shape(ellipsoid);
    if (!a) throw UnsupportedError("ellipsoid_json: body is not an ellipsoid");
    std::string out = fmt::format("{{\"dimension\": {}, \"lower_triangle\": [", a->rows());
    for (int i = 0; i < a->rows(); ++i) {
        if (i > 0) out += ",";
        out += "[";
        for (int j = 0; j <= i; ++j) {
            if (j > 0) out += ",";
            out += json_number((*a)(i, j));
        }
        out += "]";
    }
    return out + "]}";
}

std::string certificate_json(const CoverCertificate& cert) {
    std::string out = fmt::format("{{\"covered\": {}, \"covering\": {}, \"target_scale\": {}, \"lower_bound\": {}, \"size\": {}, \"centers\": [",
                                  quote(cert.covered_body.describe()), quote(cert.covering_body.describe()),
                                  json_number(cert.target_scale), json_number(cert.lower_bound), cert.size());
    for (std::size_t i = 0; i < cert.centers.size(); ++i) {
        if (i > 0) out += ",";
        out += vector_json(cert.centers[i]);
    }
    return out + "]}";
}

}  // namespace pcg
