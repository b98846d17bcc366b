// CSV emission for metric series: fixed header, 9 significant digits,
// LF line endings, empty cells for inapplicable fields. Output is a pure
// function of the series, so identical configs give byte-identical files.

#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <string>

#include "nonstat/harness.hpp"

namespace nonstat {

inline constexpr const char* kCsvHeader =
    "scenario,rule,n,k_or_r,zeta,estimate,se,target,gap,rate_ref,replications,seed";

inline std::string format_csv_number(double v) {
    if (std::isnan(v)) return "";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

inline void write_csv(const MetricSeries& series, std::ostream& os) {
    os << kCsvHeader << "\n";
    for (const MetricRow& r : series) {
        os << r.scenario << ',' << r.rule << ',' << r.n << ',' << format_csv_number(r.k_or_r)
           << ',' << format_csv_number(r.zeta) << ',' << format_csv_number(r.estimate) << ','
           << format_csv_number(r.se) << ',' << format_csv_number(r.target) << ','
           << format_csv_number(r.gap) << ',' << format_csv_number(r.rate_ref) << ','
           << r.replications << ',' << r.seed << "\n";
    }
}

inline void write_csv_file(const MetricSeries& series, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    write_csv(series, out);
    out.flush();
    if (!out) throw std::runtime_error("failed writing output file: " + path);
}

}  // namespace nonstat
