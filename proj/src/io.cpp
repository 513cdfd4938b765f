#include "ramified/io.hpp"

#include <cstdint>
#include <fstream>
#include <sstream>

namespace ramified {

namespace {

const Json& field(const Json& j, const char* name) {
    auto it = j.find(name);
    if (it == j.end()) fail(Errc::ParseError, std::string("missing field \"") + name + "\"");
    return *it;
}

double number(const Json& j, const char* what) {
    if (!j.is_number()) fail(Errc::ParseError, std::string(what) + " must be a number");
    return j.get<double>();
}

int integer(const Json& j, const char* what) {
    if (!j.is_number_integer()) fail(Errc::ParseError, std::string(what) + " must be an integer");
    return j.get<int>();
}

Point point(const Json& j) {
    if (!j.is_array()) fail(Errc::ParseError, "coordinates must be an array");
    Point p;
    p.reserve(j.size());
    for (const auto& x : j) p.push_back(number(x, "coordinate"));
    return p;
}

}  // namespace

Json measure_to_json(const AtomicMeasure& m) {
    Json j;
    j["dim"] = m.dim();
    Json atoms = Json::array();
    for (const Atom& a : m.atoms()) {
        Json atom;
        atom["p"] = a.p;
        atom["m"] = a.mass;
        atoms.push_back(std::move(atom));
    }
    j["atoms"] = std::move(atoms);
    return j;
}

AtomicMeasure measure_from_json(const Json& j, bool require_probability) {
    if (!j.is_object()) fail(Errc::ParseError, "measure must be a JSON object");
    const int dim = integer(field(j, "dim"), "dim");
    const Json& atoms_json = field(j, "atoms");
    if (!atoms_json.is_array()) fail(Errc::ParseError, "atoms must be an array");
    std::vector<Atom> atoms;
    atoms.reserve(atoms_json.size());
    for (const auto& a : atoms_json)
        atoms.push_back({point(field(a, "p")), number(field(a, "m"), "mass")});
    return AtomicMeasure::make(dim, std::move(atoms), require_probability);
}

Json network_to_json(const EmbeddedNetwork& n) {
    Json j;
    j["dim"] = n.dim();
    j["vertices"] = n.vertices();
    Json edges = Json::array();
    for (const Edge& e : n.edges()) edges.push_back(Json::array({e.tail, e.head}));
    j["edges"] = std::move(edges);
    return j;
}

EmbeddedNetwork network_from_json(const Json& j) {
    if (!j.is_object()) fail(Errc::ParseError, "network must be a JSON object");
    const int dim = integer(field(j, "dim"), "dim");
    std::vector<Point> vertices;
    for (const auto& v : field(j, "vertices")) vertices.push_back(point(v));
    std::vector<Edge> edges;
    for (const auto& e : field(j, "edges")) {
        if (!e.is_array() || e.size() != 2) fail(Errc::ParseError, "edge must be [tail, head]");
        edges.push_back({integer(e[0], "tail"), integer(e[1], "head")});
    }
    return EmbeddedNetwork::make(dim, std::move(vertices), std::move(edges));
}

Json flow_to_json(const FlowField& f) {
    Json j = network_to_json(f.network());
    j["weights"] = f.weights();
    return j;
}

FlowField flow_from_json(const Json& j) {
    EmbeddedNetwork net = network_from_json(j);
    std::vector<double> weights;
    for (const auto& w : field(j, "weights")) weights.push_back(number(w, "weight"));
    return FlowField::make(std::move(net), std::move(weights));
}

Json plan_to_json(const IrrigationPlan& p) {
    Json j;
    j["network"] = network_to_json(p.network());
    Json curves = Json::array();
    for (const auto& wc : p.curves()) {
        Json c;
        c["w"] = wc.weight;
        c["path"] = wc.curve.path();
        curves.push_back(std::move(c));
    }
    j["curves"] = std::move(curves);
    return j;
}

IrrigationPlan plan_from_json(const Json& j) {
    if (!j.is_object()) fail(Errc::ParseError, "plan must be a JSON object");
    EmbeddedNetwork net = network_from_json(field(j, "network"));
    std::vector<IrrigationPlan::WeightedCurve> curves;
    for (const auto& c : field(j, "curves")) {
        std::vector<int> path;
        for (const auto& v : field(c, "path")) path.push_back(integer(v, "path vertex"));
        curves.push_back({number(field(c, "w"), "curve weight"), Curve::make(std::move(path))});
    }
    return IrrigationPlan::make(std::move(net), std::move(curves));
}

Json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(Errc::ParseError, "cannot open " + path);
    Json j = Json::parse(in, nullptr, false);
    if (j.is_discarded()) fail(Errc::ParseError, "invalid JSON in " + path);
    return j;
}

void save_json_file(const std::string& path, const Json& j) {
    std::ofstream out(path);
    if (!out) fail(Errc::ParseError, "cannot write " + path);
    out << j.dump(2) << "\n";
}

std::string content_digest(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    static const char* hex = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = hex[h & 0xf];
        h >>= 4;
    }
    return out;
}

std::string file_digest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(Errc::ParseError, "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return content_digest(ss.str());
}

}  // namespace ramified
