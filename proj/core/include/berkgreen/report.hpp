#pragma once

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "berkgreen/elliptic.hpp"
#include "berkgreen/green.hpp"
#include "berkgreen/minimization.hpp"

namespace berkgreen {

enum class Format { Text, Json, Csv };

Format parse_format(std::string_view text);

/// %.12g; infinities print as "inf" / "-inf".
std::string format_number(double x);

struct Field {
    std::string key;
    std::variant<double, long long, bool, std::string> value;
};
using Record = std::vector<Field>;

/// Text: "key: value" per line. Json: one object, keys in order, non-finite
/// numbers as strings. Csv: header line plus one row.
std::string emit(const Record& record, Format format);

Record to_record(const EnergyReport& report);
Record to_record(const EquilibriumResult& result);

/// Adds the support of the minimizer (text and json only).
std::string emit(const EquilibriumResult& result, const MetricGraph& graph, Format format);

/// Csv: "n,D,BL,seed,h". Text and json list the same columns per record.
std::string emit(const DiscrepancyTrace& trace, Format format);

}  // namespace berkgreen
