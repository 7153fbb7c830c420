#include "berkgreen/io.hpp"

#include <charconv>
#include <fstream>
#include <numeric>
#include <regex>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace berkgreen {

namespace {

using json = nlohmann::json;
using ordered = nlohmann::ordered_json;

std::string position(std::string_view text, std::size_t offset) {
    offset = std::min(offset, text.size());
    std::size_t line = 1;
    std::size_t column = 1;
    for (std::size_t i = 0; i < offset; ++i) {
        if (text[i] == '\n') {
            ++line;
            column = 1;
        } else {
            ++column;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(column);
}

json parse_json(std::string_view text) {
    try {
        return json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        const std::size_t at = e.byte > 0 ? e.byte - 1 : 0;
        std::string what = e.what();
        if (auto colon = what.rfind(": "); colon != std::string::npos) what = what.substr(colon + 2);
        throw InputError("malformed JSON at " + position(text, at) + ": " + what);
    }
}

std::string regex_escape(std::string_view s) {
    std::string escaped;
    for (char c : s) {
        if (std::string_view(R"(\^$.|?*+()[]{})").find(c) != std::string_view::npos) escaped += '\\';
        escaped += c;
    }
    return escaped;
}

/// Finds `"key": "value"` (or just `"key":` when value is empty) in the raw
/// text so that semantic errors can point at a line.
std::string locate(std::string_view text, std::string_view key, std::string_view value) {
    std::string re = "\"" + regex_escape(key) + "\"\\s*:";
    if (!value.empty()) re += "\\s*\"" + regex_escape(value) + "\"";
    const std::regex pattern(re);
    std::match_results<std::string_view::const_iterator> m;
    if (std::regex_search(text.begin(), text.end(), m, pattern))
        return " (" + position(text, static_cast<std::size_t>(m.position(0))) + ")";
    return {};
}

class Reader {
public:
    explicit Reader(std::string_view text) : text_(text) {}

    [[noreturn]] void fail(const std::string& path, const std::string& message, std::string_view id_key = {},
                           std::string_view id = {}) const {
        throw InputError(path + ": " + message + (id_key.empty() ? std::string() : locate(text_, id_key, id)));
    }

    void object(const json& j, const std::string& path, std::initializer_list<std::string_view> keys) const {
        if (!j.is_object()) fail(path, "expected an object");
        for (const auto& [k, v] : j.items()) {
            bool known = false;
            for (auto key : keys) known = known || key == k;
            if (!known) throw InputError(path + ": unknown key '" + k + "'" + locate(text_, k, {}));
        }
    }

    const json& array(const json& j, std::string_view key, const std::string& path, bool required) const {
        static const json empty = json::array();
        auto it = j.find(key);
        if (it == j.end()) {
            if (required) fail(path, "missing key '" + std::string(key) + "'");
            return empty;
        }
        if (!it->is_array()) fail(path + "." + std::string(key), "expected an array");
        return *it;
    }

    std::string string(const json& j, std::string_view key, const std::string& path) const {
        auto it = j.find(key);
        if (it == j.end()) fail(path, "missing key '" + std::string(key) + "'");
        if (!it->is_string()) fail(path + "." + std::string(key), "expected a string");
        return it->get<std::string>();
    }

    double number(const json& j, std::string_view key, const std::string& path) const {
        auto it = j.find(key);
        if (it == j.end()) fail(path, "missing key '" + std::string(key) + "'");
        if (!it->is_number()) fail(path + "." + std::string(key), "expected a number");
        return it->get<double>();
    }

    PointType type(const json& j, const std::string& path) const {
        auto it = j.find("type");
        if (it == j.end()) return PointType::II;
        if (!it->is_string()) fail(path + ".type", "expected \"I\", \"II\" or \"III\"");
        try {
            return parse_point_type(it->get<std::string>());
        } catch (const InputError& e) {
            fail(path + ".type", e.what());
        }
    }

    std::vector<VertexRecord> vertices(const json& list, const std::string& path) const {
        std::vector<VertexRecord> out;
        for (std::size_t i = 0; i < list.size(); ++i) {
            const std::string p = path + "[" + std::to_string(i) + "]";
            object(list[i], p, {"id", "type"});
            out.push_back({string(list[i], "id", p), type(list[i], p)});
        }
        return out;
    }

    std::vector<EdgeRecord> edges(const json& list, const std::string& path) const {
        std::vector<EdgeRecord> out;
        for (std::size_t i = 0; i < list.size(); ++i) {
            const std::string p = path + "[" + std::to_string(i) + "]";
            object(list[i], p, {"id", "u", "v", "length"});
            EdgeRecord e{string(list[i], "id", p), string(list[i], "u", p), string(list[i], "v", p), number(list[i], "length", p)};
            if (e.u == e.v) fail(p, "edge '" + e.id + "' is a loop at '" + e.u + "'", "id", e.id);
            if (!(e.length > 0.0) || !std::isfinite(e.length))
                fail(p + ".length", "edge '" + e.id + "' needs a positive finite length", "id", e.id);
            out.push_back(std::move(e));
        }
        return out;
    }

    std::vector<TreeDescription> trees(const json& list, const std::string& path) const {
        std::vector<TreeDescription> out;
        for (std::size_t i = 0; i < list.size(); ++i) {
            const std::string p = path + "[" + std::to_string(i) + "]";
            const json& t = list[i];
            object(t, p, {"attach", "vertices", "edges", "leaf_types"});
            TreeDescription tree;
            tree.attach = string(t, "attach", p);
            tree.vertices = vertices(array(t, "vertices", p, false), p + ".vertices");
            tree.edges = edges(array(t, "edges", p, true), p + ".edges");
            if (auto it = t.find("leaf_types"); it != t.end()) {
                if (!it->is_object()) fail(p + ".leaf_types", "expected an object");
                for (const auto& [id, v] : it->items()) {
                    if (!v.is_string()) fail(p + ".leaf_types." + id, "expected a point type string");
                    try {
                        tree.leaf_types[id] = parse_point_type(v.get<std::string>());
                    } catch (const InputError& e) {
                        fail(p + ".leaf_types." + id, e.what());
                    }
                }
            }
            out.push_back(std::move(tree));
        }
        return out;
    }

    SpacePoint point(const json& j, const std::string& path, const MetricGraph& graph) const {
        if (!j.is_object()) fail(path, "expected a point object");
        if (j.contains("vertex")) {
            object(j, path, {"vertex"});
            const std::string id = string(j, "vertex", path);
            if (!graph.find_vertex(id)) fail(path + ".vertex", "unknown vertex '" + id + "'", "vertex", id);
            return graph.vertex_point(id);
        }
        object(j, path, {"edge", "offset"});
        const std::string id = string(j, "edge", path);
        auto e = graph.find_edge(id);
        if (!e) fail(path + ".edge", "unknown edge '" + id + "'", "edge", id);
        const double s = number(j, "offset", path);
        if (!(s >= 0.0 && s <= graph.edge(*e).length))
            fail(path + ".offset", "offset must lie in [0, length of '" + id + "']", "edge", id);
        return graph.point(*e, s);
    }

    std::string_view text() const { return text_; }

private:
    std::string_view text_;
};

/// Union-find connectivity over the whole description, reported with a location.
void check_connected(const Reader& reader, const SpaceDescription& d) {
    std::map<std::string, std::size_t> index;
    auto add = [&](const VertexRecord& v, const std::string& path) {
        if (!index.emplace(v.id, index.size()).second) reader.fail(path, "duplicate vertex id '" + v.id + "'", "id", v.id);
    };
    for (const auto& v : d.vertices) add(v, "vertices");
    for (std::size_t t = 0; t < d.trees.size(); ++t)
        for (const auto& v : d.trees[t].vertices) add(v, "trees[" + std::to_string(t) + "].vertices");
    if (index.empty()) reader.fail("vertices", "a space needs at least one vertex");

    std::vector<std::size_t> parent(index.size());
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    std::set<std::string> edge_ids;
    auto link = [&](const EdgeRecord& e, const std::string& path) {
        if (!edge_ids.insert(e.id).second) reader.fail(path, "duplicate edge id '" + e.id + "'", "id", e.id);
        for (const auto& end : {e.u, e.v})
            if (!index.count(end)) reader.fail(path, "edge '" + e.id + "' references unknown vertex '" + end + "'", "id", e.id);
        parent[find(index[e.u])] = find(index[e.v]);
    };
    for (const auto& e : d.edges) link(e, "edges");
    for (std::size_t t = 0; t < d.trees.size(); ++t) {
        if (!index.count(d.trees[t].attach))
            reader.fail("trees[" + std::to_string(t) + "].attach", "unknown attach vertex '" + d.trees[t].attach + "'");
        for (const auto& e : d.trees[t].edges) link(e, "trees[" + std::to_string(t) + "].edges");
    }
    const std::size_t root = find(0);
    for (const auto& [id, i] : index)
        if (find(i) != root) reader.fail("vertices", "space is not connected: vertex '" + id + "' is unreachable", "id", id);
}

ordered vertices_json(const std::vector<VertexRecord>& vs) {
    ordered out = ordered::array();
    for (const auto& v : vs) out.push_back({{"id", v.id}, {"type", std::string(to_string(v.type))}});
    return out;
}

ordered edges_json(const std::vector<EdgeRecord>& es) {
    ordered out = ordered::array();
    for (const auto& e : es) out.push_back({{"id", e.id}, {"u", e.u}, {"v", e.v}, {"length", e.length}});
    return out;
}

ordered point_json(const SpacePoint& p, const MetricGraph& graph) {
    if (p.is_vertex()) return {{"vertex", graph.vertex(p.vertex()).id}};
    return {{"edge", graph.edge(p.edge()).id}, {"offset", p.offset()}};
}

}  // namespace

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open file '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

SpaceDescription parse_space_description(std::string_view text) {
    const Reader r(text);
    const json root = parse_json(text);
    r.object(root, "space", {"vertices", "edges", "trees"});
    SpaceDescription d;
    d.vertices = r.vertices(r.array(root, "vertices", "space", true), "vertices");
    d.edges = r.edges(r.array(root, "edges", "space", false), "edges");
    d.trees = r.trees(r.array(root, "trees", "space", false), "trees");
    check_connected(r, d);
    return d;
}

MetricSpace parse_space(std::string_view text) { return MetricSpace(parse_space_description(text)); }

MetricSpace load_space(const std::filesystem::path& path) {
    try {
        return parse_space(read_file(path));
    } catch (const InputError& e) {
        throw InputError(path.string() + ": " + e.what());
    }
}

std::string to_json(const SpaceDescription& d) {
    ordered root;
    root["vertices"] = vertices_json(d.vertices);
    root["edges"] = edges_json(d.edges);
    if (!d.trees.empty()) {
        ordered trees = ordered::array();
        for (const auto& t : d.trees) {
            ordered tree;
            tree["attach"] = t.attach;
            tree["vertices"] = vertices_json(t.vertices);
            tree["edges"] = edges_json(t.edges);
            ordered leaf = ordered::object();
            for (const auto& [id, type] : t.leaf_types) leaf[id] = std::string(to_string(type));
            tree["leaf_types"] = leaf;
            trees.push_back(tree);
        }
        root["trees"] = trees;
    }
    return root.dump(2) + "\n";
}

std::vector<TreeDescription> parse_trees(std::string_view text) {
    const Reader r(text);
    const json root = parse_json(text);
    r.object(root, "trees file", {"trees"});
    return r.trees(r.array(root, "trees", "trees file", true), "trees");
}

SpacePoint parse_point(std::string_view text, const MetricGraph& graph) {
    const auto at = text.find('@');
    if (at == std::string_view::npos) {
        if (!graph.find_vertex(text)) throw InputError("unknown vertex '" + std::string(text) + "' (points are 'vertex' or 'edge@offset')");
        return graph.vertex_point(text);
    }
    const std::string_view edge = text.substr(0, at);
    const std::string number(text.substr(at + 1));
    auto e = graph.find_edge(edge);
    if (!e) throw InputError("unknown edge '" + std::string(edge) + "' in point '" + std::string(text) + "'");
    std::size_t used = 0;
    double s = 0.0;
    try {
        s = std::stod(number, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != number.size()) throw InputError("bad offset in point '" + std::string(text) + "'");
    if (!(s >= 0.0 && s <= graph.edge(*e).length))
        throw InputError("offset in point '" + std::string(text) + "' lies outside [0, edge length]");
    return graph.point(*e, s);
}

SignedMeasure parse_measure(std::string_view text, const MetricGraph& graph) {
    const Reader r(text);
    const json root = parse_json(text);
    r.object(root, "measure", {"atoms", "densities"});
    std::vector<Atom> atoms;
    const json& al = r.array(root, "atoms", "measure", false);
    for (std::size_t i = 0; i < al.size(); ++i) {
        const std::string p = "atoms[" + std::to_string(i) + "]";
        r.object(al[i], p, {"point", "weight"});
        if (!al[i].contains("point")) r.fail(p, "missing key 'point'");
        atoms.push_back({r.point(al[i]["point"], p + ".point", graph), r.number(al[i], "weight", p)});
    }
    std::vector<DensityPiece> pieces;
    const json& dl = r.array(root, "densities", "measure", false);
    for (std::size_t i = 0; i < dl.size(); ++i) {
        const std::string p = "densities[" + std::to_string(i) + "]";
        r.object(dl[i], p, {"edge", "from", "to", "density"});
        const std::string id = r.string(dl[i], "edge", p);
        auto e = graph.find_edge(id);
        if (!e) r.fail(p + ".edge", "unknown edge '" + id + "'", "edge", id);
        DensityPiece piece{*e, r.number(dl[i], "from", p), r.number(dl[i], "to", p), r.number(dl[i], "density", p)};
        if (!(piece.from >= 0.0 && piece.from <= piece.to && piece.to <= graph.edge(*e).length))
            r.fail(p, "needs 0 <= from <= to <= length of '" + id + "'", "edge", id);
        pieces.push_back(piece);
    }
    SignedMeasure m(std::move(atoms), std::move(pieces));
    m.validate(graph);
    return m;
}

SignedMeasure load_measure(const std::filesystem::path& path, const MetricGraph& graph) {
    try {
        return parse_measure(read_file(path), graph);
    } catch (const InputError& e) {
        throw InputError(path.string() + ": " + e.what());
    }
}

std::string to_json(const SignedMeasure& measure, const MetricGraph& graph) {
    ordered root;
    ordered atoms = ordered::array();
    for (const Atom& a : measure.atoms()) atoms.push_back({{"point", point_json(a.point, graph)}, {"weight", a.weight}});
    ordered dens = ordered::array();
    for (const DensityPiece& d : measure.densities())
        dens.push_back({{"edge", graph.edge(d.edge).id}, {"from", d.from}, {"to", d.to}, {"density", d.density}});
    root["atoms"] = atoms;
    root["densities"] = dens;
    return root.dump(2) + "\n";
}

Region parse_region(std::string_view text, const MetricGraph& graph) {
    const Reader r(text);
    const json root = parse_json(text);
    r.object(root, "region", {"segments", "points"});
    Region region;
    const json& sl = r.array(root, "segments", "region", false);
    for (std::size_t i = 0; i < sl.size(); ++i) {
        const std::string p = "segments[" + std::to_string(i) + "]";
        r.object(sl[i], p, {"edge", "from", "to"});
        const std::string id = r.string(sl[i], "edge", p);
        auto e = graph.find_edge(id);
        if (!e) r.fail(p + ".edge", "unknown edge '" + id + "'", "edge", id);
        Region::Segment s{*e, r.number(sl[i], "from", p), r.number(sl[i], "to", p)};
        if (!(s.from >= 0.0 && s.from <= s.to && s.to <= graph.edge(*e).length))
            r.fail(p, "needs 0 <= from <= to <= length of '" + id + "'", "edge", id);
        region.segments.push_back(s);
    }
    const json& pl = r.array(root, "points", "region", false);
    for (std::size_t i = 0; i < pl.size(); ++i) region.points.push_back(r.point(pl[i], "points[" + std::to_string(i) + "]", graph));
    if (region.segments.empty() && region.points.empty()) r.fail("region", "needs at least one segment or point");
    return region;
}

std::vector<SpacePoint> parse_configuration(std::string_view text, const EllipticModel& model) {
    const Reader r(text);
    const json root = parse_json(text);
    r.object(root, "points file", {"points"});
    const json& pl = r.array(root, "points", "points file", true);
    std::vector<SpacePoint> out;
    for (std::size_t i = 0; i < pl.size(); ++i) {
        const std::string p = "points[" + std::to_string(i) + "]";
        if (pl[i].is_object() && pl[i].contains("arc")) {
            r.object(pl[i], p, {"arc"});
            if (model.reduction != Reduction::Multiplicative) r.fail(p, "arc positions need multiplicative reduction");
            const double s = r.number(pl[i], "arc", p);
            if (!std::isfinite(s)) r.fail(p + ".arc", "expected a finite number");
            out.push_back(model.arc_point(s));
        } else {
            out.push_back(r.point(pl[i], p, model.space.graph()));
        }
    }
    return out;
}

}  // namespace berkgreen
