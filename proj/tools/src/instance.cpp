#include "gapm/cli/instance.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "gapm/errors.hpp"

namespace gapm::cli {

using nlohmann::json;

namespace {

/// Walks a parsed document while tracking the JSON pointer for diagnostics.
class Reader {
public:
    Reader(const json& node, std::string pointer, const std::string& source)
        : node_(node), pointer_(std::move(pointer)), source_(source) {}

    [[noreturn]] void fail(const std::string& what) const {
        throw ValidationError(source_ + ": " + (pointer_.empty() ? "/" : pointer_) + ": " + what);
    }

    const json& node() const { return node_; }
    const std::string& pointer() const { return pointer_; }

    Reader at(const std::string& key) const {
        expect_object();
        auto it = node_.find(key);
        if (it == node_.end()) fail("missing required field '" + key + "'");
        return {*it, pointer_ + "/" + key, source_};
    }

    std::optional<Reader> maybe(const std::string& key) const {
        expect_object();
        auto it = node_.find(key);
        if (it == node_.end() || it->is_null()) return std::nullopt;
        return Reader{*it, pointer_ + "/" + key, source_};
    }

    Reader at(std::size_t k) const { return {node_.at(k), pointer_ + "/" + std::to_string(k), source_}; }

    void only(std::initializer_list<const char*> allowed) const {
        expect_object();
        const std::set<std::string> keys(allowed.begin(), allowed.end());
        for (const auto& [key, value] : node_.items()) {
            if (!keys.contains(key)) fail("unknown field '" + key + "'");
        }
    }

    void expect_object() const {
        if (!node_.is_object()) fail("expected an object");
    }

    std::size_t array_size() const {
        if (!node_.is_array()) fail("expected an array");
        return node_.size();
    }

    double number() const {
        if (!node_.is_number()) fail("expected a number");
        return node_.get<double>();
    }

    /// Number, or null standing in for `null_value`.
    double number_or(double null_value) const {
        if (node_.is_null()) return null_value;
        return number();
    }

    std::size_t index() const {
        if (!node_.is_number_unsigned()) fail("expected a nonnegative integer");
        return node_.get<std::size_t>();
    }

    std::uint64_t u64() const {
        if (!node_.is_number_unsigned()) fail("expected a nonnegative integer");
        return node_.get<std::uint64_t>();
    }

    std::string string() const {
        if (!node_.is_string()) fail("expected a string");
        return node_.get<std::string>();
    }

    Vector vector(std::optional<std::size_t> size = std::nullopt) const {
        const std::size_t n = array_size();
        if (size && n != *size) fail("expected " + std::to_string(*size) + " entries, found " + std::to_string(n));
        Vector out(n);
        for (std::size_t k = 0; k < n; ++k) out[k] = at(k).number();
        return out;
    }

    Vector bounds(std::size_t size, double null_value) const {
        const std::size_t n = array_size();
        if (n != size) fail("expected " + std::to_string(size) + " entries, found " + std::to_string(n));
        Vector out(n);
        for (std::size_t k = 0; k < n; ++k) out[k] = at(k).number_or(null_value);
        return out;
    }

    Matrix matrix(std::optional<std::size_t> rows, std::size_t cols) const {
        const std::size_t r = array_size();
        if (rows && r != *rows) fail("expected " + std::to_string(*rows) + " rows, found " + std::to_string(r));
        Matrix out(r, cols);
        for (std::size_t i = 0; i < r; ++i) {
            const Vector row = at(i).vector(cols);
            for (std::size_t j = 0; j < cols; ++j) out(i, j) = row[j];
        }
        return out;
    }

    std::vector<Sense> senses(std::size_t size) const {
        const std::size_t n = array_size();
        if (n != size) fail("expected " + std::to_string(size) + " entries, found " + std::to_string(n));
        std::vector<Sense> out;
        for (std::size_t k = 0; k < n; ++k) {
            const Reader s = at(k);
            const std::string v = s.string();
            if (v != "le" && v != "ge" && v != "eq") s.fail("sense must be one of le, ge, eq");
            out.push_back(parse_sense(v));
        }
        return out;
    }

private:
    const json& node_;
    std::string pointer_;
    const std::string& source_;
};

std::string line_column(const std::string& text, std::size_t byte) {
    std::size_t line = 1;
    std::size_t col = 1;
    for (std::size_t k = 0; k < byte && k < text.size(); ++k) {
        if (text[k] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

void read_first_stage(const Reader& r, RecourseModel& model) {
    r.only({"c", "A", "b", "senses", "lower", "upper"});
    model.c = r.at("c").vector();
    const std::size_t n1 = model.c.size();
    if (n1 == 0) r.at("c").fail("at least one first-stage variable is required");
    model.b = r.at("b").vector();
    model.A = r.at("A").matrix(model.b.size(), n1);
    model.senses = r.at("senses").senses(model.b.size());
    if (auto lo = r.maybe("lower")) model.x_lower = lo->bounds(n1, -kInf);
    if (auto up = r.maybe("upper")) model.x_upper = up->bounds(n1, kInf);
}

void read_recourse(const Reader& r, RecourseModel& model) {
    r.only({"W", "q", "senses", "h", "T"});
    model.q = r.at("q").vector();
    const std::size_t n2 = model.q.size();
    if (n2 == 0) r.at("q").fail("at least one second-stage variable is required");
    model.h = r.at("h").vector();
    const std::size_t m = model.h.size();
    if (m == 0) r.at("h").fail("at least one second-stage row is required");
    model.W = r.at("W").matrix(m, n2);
    model.recourse_senses = r.at("senses").senses(m);
    model.T = r.at("T").matrix(m, model.first_stage_dim());
}

DiscreteUncertainty read_discrete(const Reader& p, const RecourseModel& model) {
    p.only({"scenarios"});
    const Reader list = p.at("scenarios");
    const std::size_t count = list.array_size();
    if (count == 0) list.fail("at least one scenario is required");
    DiscreteUncertainty out;
    double total = 0.0;
    for (std::size_t k = 0; k < count; ++k) {
        const Reader s = list.at(k);
        s.only({"weight", "h", "T"});
        DiscreteScenario sc;
        sc.weight = s.at("weight").number();
        if (!(sc.weight >= 0.0)) s.at("weight").fail("weight must be nonnegative");
        sc.h = s.at("h").vector(model.recourse_rows());
        auto t = s.maybe("T");
        sc.T = t ? t->matrix(model.recourse_rows(), model.first_stage_dim()) : model.T;
        total += sc.weight;
        out.scenarios.push_back(std::move(sc));
    }
    if (std::abs(total - 1.0) > 1e-9) list.fail("scenario weights sum to " + std::to_string(total) + ", not 1");
    return out;
}

UniformRhsUncertainty read_uniform(const Reader& p, const RecourseModel& model) {
    p.only({"row", "lo", "hi"});
    UniformRhsUncertainty out;
    out.row = p.at("row").index();
    if (out.row >= model.recourse_rows()) p.at("row").fail("row is out of range");
    out.lo = p.at("lo").number();
    out.hi = p.at("hi").number();
    if (!(out.lo < out.hi)) p.fail("support must satisfy lo < hi");
    return out;
}

GaussianTechnologyUncertainty read_gaussian(const Reader& p, const RecourseModel& model) {
    p.only({"entries", "mean", "covariance", "cvar_delta", "seed", "pool_size"});
    GaussianTechnologyUncertainty out;
    const Reader list = p.at("entries");
    const std::size_t k = list.array_size();
    if (k == 0) list.fail("at least one random entry is required");
    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (std::size_t i = 0; i < k; ++i) {
        const Reader e = list.at(i);
        e.only({"row", "col"});
        TechnologyEntry te{e.at("row").index(), e.at("col").index()};
        if (te.row >= model.recourse_rows()) e.at("row").fail("row is out of range");
        if (te.col >= model.first_stage_dim()) e.at("col").fail("col is out of range");
        if (!seen.insert({te.row, te.col}).second) e.fail("duplicate entry");
        out.entries.push_back(te);
    }
    out.mean = p.at("mean").vector(k);
    out.covariance = p.at("covariance").matrix(k, k);
    try {
        (void)symmetric_sqrt(out.covariance);
    } catch (const ValidationError& e) {
        p.at("covariance").fail(e.what());
    }
    if (auto d = p.maybe("cvar_delta")) {
        out.cvar_delta = d->number();
        if (!(*out.cvar_delta > 0.0 && *out.cvar_delta < 1.0)) d->fail("cvar_delta must lie in (0, 1)");
    }
    out.seed = p.at("seed").u64();
    if (auto n = p.maybe("pool_size")) {
        out.pool_size = n->index();
        if (out.pool_size == 0) n->fail("pool_size must be positive");
    }
    return out;
}

void attach_random_entries(Instance& inst) {
    inst.model.random_entries.clear();
    if (const auto* u = std::get_if<UniformRhsUncertainty>(&inst.uncertainty)) {
        inst.model.random_entries.push_back({RandomEntry::Target::rhs, u->row, 0, 0});
    } else if (const auto* g = std::get_if<GaussianTechnologyUncertainty>(&inst.uncertainty)) {
        for (std::size_t k = 0; k < g->entries.size(); ++k) {
            inst.model.random_entries.push_back(
                {RandomEntry::Target::technology, g->entries[k].row, g->entries[k].col, k});
        }
    }
}

json to_json(const Vector& v) { return json(v); }

json to_json(const Matrix& m) {
    json out = json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        const auto row = m.row(i);
        out.push_back(Vector(row.begin(), row.end()));
    }
    return out;
}

json bounds_json(const Vector& v) {
    json out = json::array();
    for (double b : v) out.push_back(std::isinf(b) ? json(nullptr) : json(b));
    return out;
}

json senses_json(const std::vector<Sense>& s) {
    json out = json::array();
    for (Sense v : s) out.push_back(std::string(to_string(v)));
    return out;
}

}  // namespace

Instance parse_instance(const std::string& text, const std::string& source) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(source + ": " + line_column(text, e.byte == 0 ? 0 : e.byte - 1) +
                              ": malformed JSON (" + e.what() + ")");
    }
    const Reader root(doc, "", source);
    root.only({"format", "metadata", "first_stage", "recourse", "uncertainty"});
    const Reader format = root.at("format");
    if (format.string() != kInstanceFormat) {
        format.fail("unsupported format '" + format.string() + "', expected '" + kInstanceFormat + "'");
    }

    Instance inst;
    if (auto meta = root.maybe("metadata")) {
        meta->only({"name", "description"});
        if (auto n = meta->maybe("name")) inst.metadata.name = n->string();
        if (auto d = meta->maybe("description")) inst.metadata.description = d->string();
    }
    read_first_stage(root.at("first_stage"), inst.model);
    read_recourse(root.at("recourse"), inst.model);

    const Reader unc = root.at("uncertainty");
    unc.only({"kind", "parameters"});
    const Reader kind = unc.at("kind");
    const Reader params = unc.at("parameters");
    const std::string k = kind.string();
    if (k == "discrete") {
        inst.uncertainty = read_discrete(params, inst.model);
    } else if (k == "uniform_rhs") {
        inst.uncertainty = read_uniform(params, inst.model);
    } else if (k == "gaussian_technology") {
        inst.uncertainty = read_gaussian(params, inst.model);
    } else {
        kind.fail("kind must be one of discrete, uniform_rhs, gaussian_technology");
    }
    attach_random_entries(inst);

    try {
        inst.model.validate();
    } catch (const ValidationError& e) {
        throw ValidationError(source + ": " + e.what());
    }
    return inst;
}

Instance read_instance(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open instance file '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_instance(buf.str(), path.string());
}

std::string dump_instance(const Instance& inst) {
    const RecourseModel& m = inst.model;
    json doc;
    doc["format"] = kInstanceFormat;
    doc["metadata"] = {{"name", inst.metadata.name}, {"description", inst.metadata.description}};

    json first = {{"c", to_json(m.c)}, {"A", to_json(m.A)}, {"b", to_json(m.b)}, {"senses", senses_json(m.senses)}};
    if (!m.x_lower.empty()) first["lower"] = bounds_json(m.x_lower);
    if (!m.x_upper.empty()) first["upper"] = bounds_json(m.x_upper);
    doc["first_stage"] = std::move(first);
    doc["recourse"] = {{"W", to_json(m.W)},
                       {"q", to_json(m.q)},
                       {"senses", senses_json(m.recourse_senses)},
                       {"h", to_json(m.h)},
                       {"T", to_json(m.T)}};

    json unc;
    if (const auto* d = std::get_if<DiscreteUncertainty>(&inst.uncertainty)) {
        unc["kind"] = "discrete";
        json list = json::array();
        for (const auto& s : d->scenarios) {
            list.push_back({{"weight", s.weight}, {"h", to_json(s.h)}, {"T", to_json(s.T)}});
        }
        unc["parameters"] = {{"scenarios", std::move(list)}};
    } else if (const auto* u = std::get_if<UniformRhsUncertainty>(&inst.uncertainty)) {
        unc["kind"] = "uniform_rhs";
        unc["parameters"] = {{"row", u->row}, {"lo", u->lo}, {"hi", u->hi}};
    } else {
        const auto& g = std::get<GaussianTechnologyUncertainty>(inst.uncertainty);
        unc["kind"] = "gaussian_technology";
        json entries = json::array();
        for (const auto& e : g.entries) entries.push_back({{"row", e.row}, {"col", e.col}});
        json p = {{"entries", std::move(entries)},
                  {"mean", to_json(g.mean)},
                  {"covariance", to_json(g.covariance)},
                  {"seed", g.seed},
                  {"pool_size", g.pool_size}};
        if (g.cvar_delta) p["cvar_delta"] = *g.cvar_delta;
        unc["parameters"] = std::move(p);
    }
    doc["uncertainty"] = std::move(unc);
    return doc.dump(2) + "\n";
}

void write_instance(const Instance& instance, const std::filesystem::path& path) {
    const std::string text = dump_instance(instance);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write instance file '" + path.string() + "'");
    out << text;
    if (!out) throw Error("failed writing instance file '" + path.string() + "'");
}

std::unique_ptr<UncertaintySpace> make_space(const Instance& instance, const SpaceOverrides& overrides) {
    if (const auto* d = std::get_if<DiscreteUncertainty>(&instance.uncertainty)) {
        std::vector<Realization> scenarios;
        scenarios.reserve(d->scenarios.size());
        for (const auto& s : d->scenarios) scenarios.push_back({s.h, s.T, s.weight});
        return std::make_unique<DiscreteSpace>(std::move(scenarios));
    }
    if (const auto* u = std::get_if<UniformRhsUncertainty>(&instance.uncertainty)) {
        return std::make_unique<UniformRhsSpace>(instance.model, u->lo, u->hi);
    }
    const auto& g = std::get<GaussianTechnologyUncertainty>(instance.uncertainty);
    return std::make_unique<GaussianTechnologySpace>(instance.model, g.mean, g.covariance,
                                                     overrides.seed.value_or(g.seed),
                                                     overrides.pool_size.value_or(g.pool_size), g.cvar_delta);
}

}  // namespace gapm::cli
