#include "berkgreen/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include <nlohmann/json.hpp>

namespace berkgreen {

namespace {

using ordered = nlohmann::ordered_json;

std::string text_value(const Field& f) {
    return std::visit(
        [](const auto& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, double>) return format_number(v);
            else if constexpr (std::is_same_v<T, long long>) return std::to_string(v);
            else if constexpr (std::is_same_v<T, bool>) return v ? "true" : "false";
            else return v;
        },
        f.value);
}

/// Numbers go through format_number so that json and text agree digit for digit.
ordered json_number(double x) {
    if (!std::isfinite(x)) return format_number(x);
    return ordered::parse(format_number(x));
}

ordered json_value(const Field& f) {
    return std::visit(
        [](const auto& v) -> ordered {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, double>) return json_number(v);
            else return ordered(v);
        },
        f.value);
}

ordered json_object(const Record& record) {
    ordered o = ordered::object();
    for (const Field& f : record) o[f.key] = json_value(f);
    return o;
}

}  // namespace

Format parse_format(std::string_view text) {
    if (text == "text") return Format::Text;
    if (text == "json") return Format::Json;
    if (text == "csv") return Format::Csv;
    throw InputError("unknown format '" + std::string(text) + "' (expected text, json or csv)");
}

std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

std::string emit(const Record& record, Format format) {
    std::string out;
    switch (format) {
        case Format::Text:
            for (const Field& f : record) out += f.key + ": " + text_value(f) + "\n";
            return out;
        case Format::Json:
            return json_object(record).dump(2) + "\n";
        case Format::Csv: {
            std::string header;
            for (std::size_t i = 0; i < record.size(); ++i) {
                header += (i ? "," : "") + record[i].key;
                out += (i ? "," : "") + text_value(record[i]);
            }
            return header + "\n" + out + "\n";
        }
    }
    return out;
}

Record to_record(const EnergyReport& r) {
    return {{"value", r.value}, {"diagonal", r.diagonal}, {"off_diagonal", r.off_diagonal}, {"density", r.density}, {"h", r.h}};
}

Record to_record(const EquilibriumResult& r) {
    long long support = 0;
    for (double w : r.weights) support += w > 0.0;
    return {{"value", r.value},
            {"robin_constant", r.robin_constant},
            {"capacity", r.capacity},
            {"positive_capacity", r.positive_capacity},
            {"frostman_deviation", r.frostman_deviation},
            {"frostman_scope", std::string(r.frostman_scope == EquilibriumResult::Scope::FullMesh ? "mesh" : "support")},
            {"converged", r.converged},
            {"iterations", static_cast<long long>(r.iterations)},
            {"gap", r.gap},
            {"mesh_h", r.mesh_h},
            {"mesh_size", static_cast<long long>(r.mesh.size())},
            {"support_size", support}};
}

std::string emit(const EquilibriumResult& result, const MetricGraph& graph, Format format) {
    const Record record = to_record(result);
    if (format == Format::Csv) return emit(record, format);
    if (format == Format::Text) {
        std::string out = emit(record, format);
        for (const Atom& a : result.minimizer.atoms())
            out += "support: " + graph.describe(a.point) + " " + format_number(a.weight) + "\n";
        return out;
    }
    ordered o = json_object(record);
    ordered support = ordered::array();
    for (const Atom& a : result.minimizer.atoms())
        support.push_back({{"point", graph.describe(a.point)}, {"weight", json_number(a.weight)}});
    o["support"] = support;
    return o.dump(2) + "\n";
}

std::string emit(const DiscrepancyTrace& trace, Format format) {
    if (format == Format::Csv) {
        std::ostringstream out;
        write_csv(out, trace);
        return out.str();
    }
    std::string out;
    ordered rows = ordered::array();
    for (const auto& r : trace.records) {
        const Record rec{{"n", static_cast<long long>(r.n)},
                         {"D", r.discrepancy},
                         {"BL", r.bl},
                         {"seed", std::to_string(trace.seed)},
                         {"h", trace.h}};
        if (format == Format::Text) {
            for (std::size_t i = 0; i < rec.size(); ++i) out += (i ? " " : "") + rec[i].key + "=" + text_value(rec[i]);
            out += "\n";
        } else {
            rows.push_back(json_object(rec));
        }
    }
    if (format == Format::Json) {
        ordered o;
        o["generator"] = std::string(to_string(trace.generator));
        o["seed"] = trace.seed;
        o["h"] = json_number(trace.h);
        o["bl_resolution"] = json_number(trace.bl_resolution);
        o["records"] = rows;
        return o.dump(2) + "\n";
    }
    return out;
}

}  // namespace berkgreen
