#include "cclab/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "cclab/error.hpp"

namespace cclab {

namespace {

[[noreturn]] void config_fail(const std::string& path, const std::string& msg) {
    fail(ErrorCode::ConfigError, (path.empty() ? std::string("<root>") : path) + ": " + msg);
}

std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
}

std::string join(const std::string& path, std::size_t i) {
    return path + "[" + std::to_string(i) + "]";
}

void require_object(const json& j, const std::string& path) {
    if (!j.is_object()) config_fail(path, "expected an object");
}

void check_keys(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
    require_object(j, path);
    for (const auto& [key, _] : j.items()) {
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }))
            config_fail(join(path, key), "unknown field");
    }
}

const json& field(const json& j, const std::string& path, const char* key) {
    auto it = j.find(key);
    if (it == j.end()) config_fail(join(path, key), "missing required field");
    return *it;
}

bool has(const json& j, const char* key) { return j.contains(key) && !j.at(key).is_null(); }

double as_double(const json& j, const std::string& path) {
    if (!j.is_number()) config_fail(path, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) config_fail(path, "expected a finite number");
    return v;
}

std::size_t as_size(const json& j, const std::string& path) {
    if (j.is_number_unsigned()) return j.get<std::size_t>();
    if (j.is_number_integer()) {
        if (j.get<std::int64_t>() < 0) config_fail(path, "expected a nonnegative integer");
        return static_cast<std::size_t>(j.get<std::int64_t>());
    }
    config_fail(path, "expected a nonnegative integer");
}

std::uint64_t as_u64(const json& j, const std::string& path) {
    return static_cast<std::uint64_t>(as_size(j, path));
}

bool as_bool(const json& j, const std::string& path) {
    if (!j.is_boolean()) config_fail(path, "expected true or false");
    return j.get<bool>();
}

std::string as_string(const json& j, const std::string& path) {
    if (!j.is_string()) config_fail(path, "expected a string");
    return j.get<std::string>();
}

const json& as_array(const json& j, const std::string& path) {
    if (!j.is_array()) config_fail(path, "expected an array");
    return j;
}

std::vector<std::size_t> size_list(const json& j, const std::string& path) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < as_array(j, path).size(); ++i) out.push_back(as_size(j[i], join(path, i)));
    return out;
}

std::string kind_of(const json& j, const std::string& path) {
    require_object(j, path);
    return as_string(field(j, path, "kind"), join(path, "kind"));
}

/// Runs a domain validator and rethrows its failure as a config error at `path`.
template <class F>
auto domain(const std::string& path, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const Error& e) {
        if (e.code() == ErrorCode::ConfigError) throw;
        config_fail(path, e.what());
    }
}

// ---- scalars and vectors ----

template <Scalar S>
S scalar_from(const json& j, const std::string& path) {
    if constexpr (is_complex_v<S>) {
        if (j.is_array()) {
            if (j.size() != 2) config_fail(path, "complex values are [re, im]");
            return S{as_double(j[0], join(path, 0)), as_double(j[1], join(path, 1))};
        }
        return S{as_double(j, path), 0.0};
    } else {
        if (j.is_array()) config_fail(path, "complex value in a real-field experiment");
        return as_double(j, path);
    }
}

template <Scalar S>
json scalar_to(const S& s) {
    if constexpr (is_complex_v<S>) {
        if (s.imag() == 0.0) return s.real();
        return json::array({s.real(), s.imag()});
    } else {
        return s;
    }
}

template <Scalar S>
TruncVector<S> vector_from(const json& j, const std::string& path, std::size_t dim, double p) {
    TruncVector<S> v(dim, p);
    std::set<std::size_t> seen;
    for (std::size_t i = 0; i < as_array(j, path).size(); ++i) {
        const auto ep = join(path, i);
        const auto& e = j[i];
        if (!e.is_array() || e.size() != 2) config_fail(ep, "vector entries are [index, value]");
        const auto idx = as_size(e[0], join(ep, 0));
        if (idx >= dim) config_fail(ep, "index " + std::to_string(idx) + " >= dim " + std::to_string(dim));
        if (!seen.insert(idx).second) config_fail(ep, "duplicate index " + std::to_string(idx));
        v[idx] = scalar_from<S>(e[1], join(ep, 1));
    }
    return v;
}

template <Scalar S>
std::vector<TruncVector<S>> vectors_from(const json& j, const std::string& path, std::size_t dim,
                                         double p) {
    std::vector<TruncVector<S>> out;
    for (std::size_t i = 0; i < as_array(j, path).size(); ++i)
        out.push_back(vector_from<S>(j[i], join(path, i), dim, p));
    return out;
}

template <Scalar S>
json vectors_to(const std::vector<TruncVector<S>>& vs) {
    json out = json::array();
    for (const auto& v : vs) out.push_back(vector_to_json(v));
    return out;
}

// ---- polynomials ----

ConvexPolynomial poly_from(const json& j, const std::string& path, CoefficientPolicy policy) {
    std::map<std::size_t, double> terms;
    for (std::size_t i = 0; i < as_array(j, path).size(); ++i) {
        const auto tp = join(path, i);
        const auto& t = j[i];
        if (!t.is_array() || t.size() != 2) config_fail(tp, "polynomial terms are [degree, coefficient]");
        const auto d = as_size(t[0], join(tp, 0));
        if (d > 1'000'000) config_fail(tp, "degree too large");
        if (!terms.emplace(d, as_double(t[1], join(tp, 1))).second)
            config_fail(tp, "duplicate degree " + std::to_string(d));
    }
    if (terms.empty()) config_fail(path, "polynomial needs at least one term");
    std::vector<double> c(terms.rbegin()->first + 1, 0.0);
    for (const auto& [d, a] : terms) c[d] = a;
    return domain(path, [&] { return ConvexPolynomial(std::move(c), policy); });
}

std::vector<ConvexPolynomial> polys_from(const json& j, const std::string& path, CoefficientPolicy policy) {
    std::vector<ConvexPolynomial> out;
    for (std::size_t i = 0; i < as_array(j, path).size(); ++i)
        out.push_back(poly_from(j[i], join(path, i), policy));
    return out;
}

json polys_to(const std::vector<ConvexPolynomial>& ps) {
    json out = json::array();
    for (const auto& p : ps) out.push_back(poly_to_json(p));
    return out;
}

// ---- operators ----

template <Scalar S>
Weights<S> weights_from(const json& j, const std::string& path) {
    Weights<S> w;
    if (has(j, "weight")) w.constant = scalar_from<S>(j["weight"], join(path, "weight"));
    if (has(j, "weights")) {
        const auto wp = join(path, "weights");
        for (std::size_t i = 0; i < as_array(j["weights"], wp).size(); ++i)
            w.per_index.push_back(scalar_from<S>(j["weights"][i], join(wp, i)));
        if (w.per_index.empty()) config_fail(wp, "weight list is empty");
    }
    return w;
}

template <Scalar S>
void weights_to(json& out, const Weights<S>& w) {
    if (w.per_index.empty() || w.constant != S{1.0}) out["weight"] = scalar_to(w.constant);
    if (!w.per_index.empty()) {
        json arr = json::array();
        for (const auto& s : w.per_index) arr.push_back(scalar_to(s));
        out["weights"] = arr;
    }
}

template <Scalar S>
OperatorSpec<S> operator_from(const json& j, const std::string& path) {
    const auto kind = kind_of(j, path);
    if (kind == "backward_shift" || kind == "forward_shift") {
        check_keys(j, path, {"kind", "weight", "weights"});
        auto w = weights_from<S>(j, path);
        if (kind == "backward_shift") return {BackwardShift<S>{std::move(w)}};
        return {ForwardShift<S>{std::move(w)}};
    }
    if (kind == "scale") {
        check_keys(j, path, {"kind", "lambda", "inner"});
        return OperatorSpec<S>::scaled(scalar_from<S>(field(j, path, "lambda"), join(path, "lambda")),
                                       operator_from<S>(field(j, path, "inner"), join(path, "inner")));
    }
    if (kind == "direct_sum") {
        check_keys(j, path, {"kind", "left_dim", "left", "right"});
        return OperatorSpec<S>::direct_sum(as_size(field(j, path, "left_dim"), join(path, "left_dim")),
                                           operator_from<S>(field(j, path, "left"), join(path, "left")),
                                           operator_from<S>(field(j, path, "right"), join(path, "right")));
    }
    if (kind == "dense") {
        check_keys(j, path, {"kind", "n", "entries"});
        const auto n = as_size(field(j, path, "n"), join(path, "n"));
        const auto ep = join(path, "entries");
        const auto& arr = as_array(field(j, path, "entries"), ep);
        std::vector<S> entries;
        for (std::size_t i = 0; i < arr.size(); ++i) entries.push_back(scalar_from<S>(arr[i], join(ep, i)));
        return OperatorSpec<S>::dense(n, std::move(entries));
    }
    if (kind == "identity") {
        check_keys(j, path, {"kind"});
        return OperatorSpec<S>::identity();
    }
    if (kind == "power") {
        check_keys(j, path, {"kind", "inner", "exponent"});
        return OperatorSpec<S>::power(operator_from<S>(field(j, path, "inner"), join(path, "inner")),
                                      as_size(field(j, path, "exponent"), join(path, "exponent")));
    }
    config_fail(join(path, "kind"), "unknown operator kind '" + kind + "'");
}

template <Scalar S>
json operator_to(const OperatorSpec<S>& op) {
    return std::visit(
        [](const auto& k) -> json {
            using K = std::decay_t<decltype(k)>;
            json out;
            if constexpr (std::is_same_v<K, BackwardShift<S>>) {
                out["kind"] = "backward_shift";
                weights_to(out, k.weights);
            } else if constexpr (std::is_same_v<K, ForwardShift<S>>) {
                out["kind"] = "forward_shift";
                weights_to(out, k.weights);
            } else if constexpr (std::is_same_v<K, Scale<S>>) {
                out["kind"] = "scale";
                out["lambda"] = scalar_to(k.lambda);
                out["inner"] = operator_to(*k.inner);
            } else if constexpr (std::is_same_v<K, DirectSum<S>>) {
                out["kind"] = "direct_sum";
                out["left_dim"] = k.left_dim;
                out["left"] = operator_to(*k.left);
                out["right"] = operator_to(*k.right);
            } else if constexpr (std::is_same_v<K, Dense<S>>) {
                out["kind"] = "dense";
                out["n"] = k.n;
                json arr = json::array();
                for (const auto& s : k.entries) arr.push_back(scalar_to(s));
                out["entries"] = arr;
            } else if constexpr (std::is_same_v<K, Identity>) {
                out["kind"] = "identity";
            } else {
                out["kind"] = "power";
                out["inner"] = operator_to(*k.inner);
                out["exponent"] = k.exponent;
            }
            return out;
        },
        op.kind);
}

// ---- subspaces ----

BlockPosition position_from(const json& j, const std::string& path) {
    const auto s = as_string(j, path);
    if (s == "left") return BlockPosition::Left;
    if (s == "right") return BlockPosition::Right;
    config_fail(path, "expected 'left' or 'right'");
}

const char* position_to(BlockPosition b) { return b == BlockPosition::Left ? "left" : "right"; }

SubspaceSpec subspace_from(const json& j, const std::string& path) {
    const auto kind = kind_of(j, path);
    if (kind == "index_set") {
        check_keys(j, path, {"kind", "indices"});
        return {IndexSet{size_list(field(j, path, "indices"), join(path, "indices"))}};
    }
    if (kind == "interval_family") {
        check_keys(j, path, {"kind", "starts", "ends"});
        return {IntervalFamily{size_list(field(j, path, "starts"), join(path, "starts")),
                               size_list(field(j, path, "ends"), join(path, "ends"))}};
    }
    if (kind == "parity_zero") {
        check_keys(j, path, {"kind", "zero"});
        const auto s = as_string(field(j, path, "zero"), join(path, "zero"));
        if (s != "even" && s != "odd") config_fail(join(path, "zero"), "expected 'even' or 'odd'");
        return {ParityZero{s == "even" ? Parity::Even : Parity::Odd}};
    }
    if (kind == "recursive") {
        check_keys(j, path, {"kind", "shifts", "depth", "base_shift_weight"});
        Recursive r;
        r.shifts = size_list(field(j, path, "shifts"), join(path, "shifts"));
        r.depth = as_size(field(j, path, "depth"), join(path, "depth"));
        if (has(j, "base_shift_weight"))
            r.base_shift_weight = as_double(j["base_shift_weight"], join(path, "base_shift_weight"));
        return {r};
    }
    if (kind == "direct_sum_factor") {
        check_keys(j, path, {"kind", "position", "left_dim", "inner"});
        DirectSumFactor f;
        f.position = position_from(field(j, path, "position"), join(path, "position"));
        f.left_dim = as_size(field(j, path, "left_dim"), join(path, "left_dim"));
        if (has(j, "inner"))
            f.inner = std::make_shared<const SubspaceSpec>(subspace_from(j["inner"], join(path, "inner")));
        return {f};
    }
    config_fail(join(path, "kind"), "unknown subspace kind '" + kind + "'");
}

json subspace_to(const SubspaceSpec& s) {
    return std::visit(
        [](const auto& k) -> json {
            using K = std::decay_t<decltype(k)>;
            json out;
            if constexpr (std::is_same_v<K, IndexSet>) {
                out["kind"] = "index_set";
                out["indices"] = k.indices;
            } else if constexpr (std::is_same_v<K, IntervalFamily>) {
                out["kind"] = "interval_family";
                out["starts"] = k.starts;
                out["ends"] = k.ends;
            } else if constexpr (std::is_same_v<K, ParityZero>) {
                out["kind"] = "parity_zero";
                out["zero"] = k.zero == Parity::Even ? "even" : "odd";
            } else if constexpr (std::is_same_v<K, Recursive>) {
                out["kind"] = "recursive";
                out["shifts"] = k.shifts;
                out["depth"] = k.depth;
                out["base_shift_weight"] = k.base_shift_weight;
            } else {
                out["kind"] = "direct_sum_factor";
                out["position"] = position_to(k.position);
                out["left_dim"] = k.left_dim;
                if (k.inner) out["inner"] = subspace_to(*k.inner);
            }
            return out;
        },
        s.kind);
}

// ---- families and sequences ----

PolynomialFamily family_from(const json& j, const std::string& path, CoefficientPolicy policy) {
    const auto kind = kind_of(j, path);
    auto sz = [&](const char* key) { return as_size(field(j, path, key), join(path, key)); };
    if (kind == "monomials") {
        check_keys(j, path, {"kind", "max_degree", "stride"});
        Monomials m{sz("max_degree"), 1};
        if (has(j, "stride")) m.stride = sz("stride");
        if (m.stride == 0) config_fail(join(path, "stride"), "stride must be >= 1");
        return {m};
    }
    if (kind == "cesaro") {
        check_keys(j, path, {"kind", "max_degree"});
        return {CesaroMeans{sz("max_degree")}};
    }
    if (kind == "simplex_grid") {
        check_keys(j, path, {"kind", "degree", "resolution"});
        SimplexGrid g{sz("degree"), sz("resolution")};
        if (g.resolution == 0) config_fail(join(path, "resolution"), "resolution must be >= 1");
        return {g};
    }
    if (kind == "random_simplex") {
        check_keys(j, path, {"kind", "degree", "count", "seed"});
        return {RandomSimplex{sz("degree"), sz("count"), as_u64(field(j, path, "seed"), join(path, "seed"))}};
    }
    if (kind == "explicit") {
        check_keys(j, path, {"kind", "members"});
        return {ExplicitFamily{polys_from(field(j, path, "members"), join(path, "members"), policy)}};
    }
    config_fail(join(path, "kind"), "unknown family kind '" + kind + "'");
}

ExponentRule exponents_from(const json& j, const std::string& path) {
    const auto kind = kind_of(j, path);
    if (kind == "linear") {
        check_keys(j, path, {"kind", "stride", "offset"});
        ExponentRule::Linear l;
        if (has(j, "stride")) l.stride = as_size(j["stride"], join(path, "stride"));
        if (has(j, "offset")) l.offset = as_size(j["offset"], join(path, "offset"));
        return {l};
    }
    if (kind == "list") {
        check_keys(j, path, {"kind", "values"});
        return {ExponentRule::List{size_list(field(j, path, "values"), join(path, "values"))}};
    }
    config_fail(join(path, "kind"), "unknown exponent rule '" + kind + "'");
}

json exponents_to(const ExponentRule& r) {
    if (const auto* l = std::get_if<ExponentRule::Linear>(&r.kind))
        return {{"kind", "linear"}, {"stride", l->stride}, {"offset", l->offset}};
    return {{"kind", "list"}, {"values", std::get<ExponentRule::List>(r.kind).values}};
}

PolySequence sequence_from(const json& j, const std::string& path, CoefficientPolicy policy) {
    const auto kind = kind_of(j, path);
    if (kind == "monomial_powers") {
        check_keys(j, path, {"kind", "exponents"});
        return {PolySequence::MonomialPowers{exponents_from(field(j, path, "exponents"), join(path, "exponents"))}};
    }
    if (kind == "explicit") {
        check_keys(j, path, {"kind", "polys"});
        return {PolySequence::Explicit{polys_from(field(j, path, "polys"), join(path, "polys"), policy)}};
    }
    config_fail(join(path, "kind"), "unknown polynomial sequence kind '" + kind + "'");
}

json sequence_to(const PolySequence& s) {
    if (const auto* m = std::get_if<PolySequence::MonomialPowers>(&s.kind))
        return {{"kind", "monomial_powers"}, {"exponents", exponents_to(m->exponents)}};
    return {{"kind", "explicit"}, {"polys", polys_to(std::get<PolySequence::Explicit>(s.kind).polys)}};
}

template <Scalar S>
RecoveryRule<S> recovery_from(const json& j, const std::string& path, std::size_t dim, double p) {
    const auto kind = kind_of(j, path);
    if (kind == "operator_power") {
        check_keys(j, path, {"kind", "operator", "exponents"});
        return {typename RecoveryRule<S>::OperatorPower{
            operator_from<S>(field(j, path, "operator"), join(path, "operator")),
            exponents_from(field(j, path, "exponents"), join(path, "exponents"))}};
    }
    if (kind == "explicit_list") {
        check_keys(j, path, {"kind", "vectors"});
        return {typename RecoveryRule<S>::ExplicitList{
            vectors_from<S>(field(j, path, "vectors"), join(path, "vectors"), dim, p)}};
    }
    config_fail(join(path, "kind"), "unknown recovery rule '" + kind + "'");
}

template <Scalar S>
json recovery_to(const RecoveryRule<S>& r) {
    if (const auto* op = std::get_if<typename RecoveryRule<S>::OperatorPower>(&r.kind))
        return {{"kind", "operator_power"}, {"operator", operator_to(op->op)}, {"exponents", exponents_to(op->exponents)}};
    return {{"kind", "explicit_list"},
            {"vectors", vectors_to(std::get<typename RecoveryRule<S>::ExplicitList>(r.kind).vectors)}};
}

// ---- expectations ----

ConditionFlags flags_from(const json& j, const std::string& path) {
    check_keys(j, path, {"cond1", "cond2", "cond3"});
    return {as_bool(field(j, path, "cond1"), join(path, "cond1")),
            as_bool(field(j, path, "cond2"), join(path, "cond2")),
            as_bool(field(j, path, "cond3"), join(path, "cond3"))};
}

json flags_to(const ConditionFlags& f) { return {{"cond1", f.cond1}, {"cond2", f.cond2}, {"cond3", f.cond3}}; }

Expectations expected_from(const json& j, const std::string& path) {
    check_keys(j, path, {"criterion_I", "criterion_II", "density", "transitivity", "build", "screen_passes",
                         "orbit_confined"});
    Expectations e;
    if (has(j, "criterion_I")) e.criterion_I = flags_from(j["criterion_I"], join(path, "criterion_I"));
    if (has(j, "criterion_II")) e.criterion_II = flags_from(j["criterion_II"], join(path, "criterion_II"));
    if (has(j, "density")) {
        const auto s = as_string(j["density"], join(path, "density"));
        if (s == "dense") e.density = DensityVerdict::DenseAtScale;
        else if (s == "not_covered") e.density = DensityVerdict::NotCoveredAtScale;
        else config_fail(join(path, "density"), "expected 'dense' or 'not_covered'");
    }
    if (has(j, "transitivity")) {
        const auto s = as_string(j["transitivity"], join(path, "transitivity"));
        if (s == "all_found") e.transitivity = TransitivityExpectation::AllFound;
        else if (s == "any_found") e.transitivity = TransitivityExpectation::AnyFound;
        else if (s == "none_found") e.transitivity = TransitivityExpectation::NoneFound;
        else config_fail(join(path, "transitivity"), "expected 'all_found', 'any_found' or 'none_found'");
    }
    if (has(j, "build")) {
        const auto s = as_string(j["build"], join(path, "build"));
        if (s == "succeeds") e.build = BuildExpectation::Succeeds;
        else if (s == "infeasible") e.build = BuildExpectation::Infeasible;
        else config_fail(join(path, "build"), "expected 'succeeds' or 'infeasible'");
    }
    if (has(j, "screen_passes")) e.screen_passes = as_bool(j["screen_passes"], join(path, "screen_passes"));
    if (has(j, "orbit_confined")) e.orbit_confined = as_bool(j["orbit_confined"], join(path, "orbit_confined"));
    return e;
}

json expected_to(const Expectations& e) {
    json out = json::object();
    if (e.criterion_I) out["criterion_I"] = flags_to(*e.criterion_I);
    if (e.criterion_II) out["criterion_II"] = flags_to(*e.criterion_II);
    if (e.density) out["density"] = *e.density == DensityVerdict::DenseAtScale ? "dense" : "not_covered";
    if (e.transitivity) {
        static const char* names[] = {"all_found", "any_found", "none_found"};
        out["transitivity"] = names[static_cast<int>(*e.transitivity)];
    }
    if (e.build) out["build"] = *e.build == BuildExpectation::Succeeds ? "succeeds" : "infeasible";
    if (e.screen_passes) out["screen_passes"] = *e.screen_passes;
    if (e.orbit_confined) out["orbit_confined"] = *e.orbit_confined;
    return out;
}

// ---- experiment ----

bool needs_seed(const json& j) {
    if (has(j, "transitivity")) return true;
    if (has(j, "density")) {
        const auto& d = j["density"];
        if (d.is_object() && d.contains("targets") && d["targets"].is_object()) return true;
    }
    return false;
}

template <Scalar S>
Experiment<S> experiment_from(const json& j) {
    check_keys(j, "", {"version", "name", "description", "scalar_field", "dim", "p", "operator", "subspace",
                       "family", "tolerances", "horizon", "seed", "options", "criterion", "density",
                       "transitivity", "build", "screen", "expected"});
    Experiment<S> e;
    e.version = static_cast<int>(as_size(field(j, "", "version"), "version"));
    if (e.version != kConfigVersion)
        config_fail("version", "unsupported version " + std::to_string(e.version));
    if (has(j, "name")) e.name = as_string(j["name"], "name");
    if (has(j, "description")) e.description = as_string(j["description"], "description");
    e.dim = as_size(field(j, "", "dim"), "dim");
    if (e.dim == 0) config_fail("dim", "must be positive");
    if (has(j, "p")) e.p = as_double(j["p"], "p");
    if (e.p < 1.0) config_fail("p", "must be >= 1");

    if (has(j, "options")) {
        const auto& o = j["options"];
        check_keys(o, "options", {"allow_signed_coefficients", "overflow", "grow_cap", "include_outside", "threads"});
        if (has(o, "allow_signed_coefficients"))
            e.options.allow_signed_coefficients = as_bool(o["allow_signed_coefficients"], "options.allow_signed_coefficients");
        if (has(o, "overflow")) {
            const auto s = as_string(o["overflow"], "options.overflow");
            if (s == "error") e.options.overflow = OverflowPolicy::Error;
            else if (s == "auto_grow") e.options.overflow = OverflowPolicy::AutoGrow;
            else config_fail("options.overflow", "expected 'error' or 'auto_grow'");
        }
        if (has(o, "grow_cap")) e.options.grow_cap = as_size(o["grow_cap"], "options.grow_cap");
        if (has(o, "include_outside")) e.options.include_outside = as_bool(o["include_outside"], "options.include_outside");
        if (has(o, "threads")) e.options.threads = as_size(o["threads"], "options.threads");
    }
    const auto policy = e.options.allow_signed_coefficients ? CoefficientPolicy::Signed
                                                            : CoefficientPolicy::Nonnegative;

    e.op = operator_from<S>(field(j, "", "operator"), "operator");
    domain("operator", [&] { validate(e.op); });
    e.subspace = subspace_from(field(j, "", "subspace"), "subspace");
    domain("subspace", [&] {
        validate(e.subspace);
        (void)materialize_subspace(e.subspace, e.dim);
    });
    if (has(j, "family")) e.family = family_from(j["family"], "family", policy);

    if (has(j, "tolerances")) {
        const auto& t = j["tolerances"];
        check_keys(t, "tolerances", {"membership", "convergence", "epsilon"});
        if (has(t, "membership")) e.tolerances.membership = as_double(t["membership"], "tolerances.membership");
        if (has(t, "convergence")) e.tolerances.convergence = as_double(t["convergence"], "tolerances.convergence");
        if (has(t, "epsilon")) e.tolerances.epsilon = as_double(t["epsilon"], "tolerances.epsilon");
        if (e.tolerances.membership < 0 || e.tolerances.convergence < 0 || !(e.tolerances.epsilon > 0))
            config_fail("tolerances", "tolerances must be nonnegative and epsilon positive");
    }
    if (has(j, "horizon")) e.horizon = as_size(j["horizon"], "horizon");
    if (has(j, "seed")) e.seed = as_u64(j["seed"], "seed");
    if (needs_seed(j) && !e.seed) config_fail("seed", "required when sampling is requested");

    if (has(j, "criterion")) {
        const auto& c = j["criterion"];
        check_keys(c, "criterion", {"X", "Y", "polys", "recovery", "recovery_by_index"});
        CriterionBlock<S> b{.polys = sequence_from(field(c, "criterion", "polys"), "criterion.polys", policy)};
        if (has(c, "X")) b.X = vectors_from<S>(c["X"], "criterion.X", e.dim, e.p);
        if (has(c, "Y")) b.Y = vectors_from<S>(c["Y"], "criterion.Y", e.dim, e.p);
        if (has(c, "recovery")) b.recovery = recovery_from<S>(c["recovery"], "criterion.recovery", e.dim, e.p);
        if (has(c, "recovery_by_index")) {
            const std::string rp = "criterion.recovery_by_index";
            for (std::size_t i = 0; i < as_array(c["recovery_by_index"], rp).size(); ++i) {
                const auto ip = join(rp, i);
                const auto& r = c["recovery_by_index"][i];
                check_keys(r, ip, {"index", "rule"});
                const auto idx = as_size(field(r, ip, "index"), join(ip, "index"));
                if (!b.recovery_by_index.emplace(idx, recovery_from<S>(field(r, ip, "rule"), join(ip, "rule"), e.dim, e.p)).second)
                    config_fail(ip, "duplicate index " + std::to_string(idx));
            }
        }
        e.criterion = std::move(b);
        domain("criterion", [&] { validate(e.criterion_instance(), e.tolerances.membership); });
    }

    if (has(j, "density")) {
        const auto& d = j["density"];
        check_keys(d, "density", {"candidate", "targets"});
        DensityBlock<S> b;
        const auto& cand = field(d, "density", "candidate");
        if (cand.is_string()) {
            if (cand.get<std::string>() != "build") config_fail("density.candidate", "expected a vector or \"build\"");
            if (!e.criterion || !has(j, "build"))
                config_fail("density.candidate", "\"build\" needs criterion and build blocks");
            b.candidate = BuildCandidate{};
        } else {
            b.candidate = vector_from<S>(cand, "density.candidate", e.dim, e.p);
        }
        if (has(d, "targets")) {
            const auto& t = d["targets"];
            if (t.is_string()) {
                if (t.get<std::string>() != "Y") config_fail("density.targets", "expected a list, \"Y\" or {\"sample\": n}");
                if (!e.criterion) config_fail("density.targets", "\"Y\" needs a criterion block");
                b.targets = TargetsFromY{};
            } else if (t.is_object()) {
                check_keys(t, "density.targets", {"sample"});
                b.targets = SampledTargets{as_size(field(t, "density.targets", "sample"), "density.targets.sample")};
            } else {
                b.targets = vectors_from<S>(t, "density.targets", e.dim, e.p);
            }
        } else {
            if (!e.seed) config_fail("seed", "required when sampling is requested");
        }
        if (!e.family) config_fail("family", "required by the density block");
        e.density = std::move(b);
    }

    if (has(j, "transitivity")) {
        const auto& t = j["transitivity"];
        check_keys(t, "transitivity", {"pairs", "samples_per_ball"});
        TransitivityBlock<S> b;
        const std::string pp = "transitivity.pairs";
        for (std::size_t i = 0; i < as_array(field(t, "transitivity", "pairs"), pp).size(); ++i) {
            const auto ip = join(pp, i);
            const auto& pr = t["pairs"][i];
            check_keys(pr, ip, {"u_center", "v_center", "radius"});
            b.pairs.push_back({vector_from<S>(field(pr, ip, "u_center"), join(ip, "u_center"), e.dim, e.p),
                               vector_from<S>(field(pr, ip, "v_center"), join(ip, "v_center"), e.dim, e.p),
                               as_double(field(pr, ip, "radius"), join(ip, "radius"))});
            if (!(b.pairs.back().radius > 0)) config_fail(join(ip, "radius"), "must be positive");
        }
        if (has(t, "samples_per_ball")) b.samples_per_ball = as_size(t["samples_per_ball"], "transitivity.samples_per_ball");
        if (b.samples_per_ball == 0) config_fail("transitivity.samples_per_ball", "must be >= 1");
        if (!e.family) config_fail("family", "required by the transitivity block");
        e.transitivity = std::move(b);
    }

    if (has(j, "build")) {
        const auto& b = j["build"];
        check_keys(b, "build", {"j_max", "c", "k_step"});
        BuildBlock bb;
        if (has(b, "j_max")) bb.j_max = as_size(b["j_max"], "build.j_max");
        if (has(b, "c")) bb.c = as_double(b["c"], "build.c");
        if (has(b, "k_step")) bb.k_step = as_size(b["k_step"], "build.k_step");
        if (bb.j_max == 0 || !(bb.c > 0) || bb.k_step == 0)
            config_fail("build", "j_max and k_step must be >= 1 and c positive");
        if (!e.criterion) config_fail("build", "needs a criterion block");
        e.build = bb;
    }

    if (has(j, "screen")) {
        const auto& s = j["screen"];
        check_keys(s, "screen", {"horizon", "growth_threshold", "block"});
        ScreenBlock sb;
        if (has(s, "horizon")) sb.horizon = as_size(s["horizon"], "screen.horizon");
        if (has(s, "growth_threshold")) sb.growth_threshold = as_double(s["growth_threshold"], "screen.growth_threshold");
        if (has(s, "block")) sb.block = position_from(s["block"], "screen.block");
        if (sb.horizon == 0) config_fail("screen.horizon", "must be >= 1");
        e.screen = sb;
    }

    if (has(j, "expected")) e.expected = expected_from(j["expected"], "expected");
    return e;
}

}  // namespace

bool Expectations::empty() const {
    return !criterion_I && !criterion_II && !density && !transitivity && !build && !screen_passes &&
           !orbit_confined;
}

template <Scalar S>
RunOptions Experiment<S>::run_options() const {
    RunOptions r;
    r.eval.overflow = options.overflow;
    r.eval.grow_cap = options.grow_cap;
    r.membership_tol = tolerances.membership;
    r.include_outside = options.include_outside;
    r.threads = options.threads;
    return r;
}

template <Scalar S>
CriterionInstance<S> Experiment<S>::criterion_instance() const {
    if (!criterion) fail(ErrorCode::ConfigError, "criterion: block is missing");
    CriterionInstance<S> inst{op, subspace, dim, p, criterion->X, criterion->Y, criterion->polys,
                              criterion->recovery, criterion->recovery_by_index};
    return inst;
}

template <Scalar S>
json vector_to_json(const TruncVector<S>& v) {
    json out = json::array();
    for (std::size_t i = 0; i < v.dim(); ++i)
        if (v[i] != S{}) out.push_back(json::array({i, scalar_to(v[i])}));
    return out;
}

json poly_to_json(const ConvexPolynomial& p) {
    json out = json::array();
    for (const auto& [d, c] : p.terms()) out.push_back(json::array({d, c}));
    if (out.empty()) out.push_back(json::array({0, 0.0}));
    return out;
}

json family_to_json(const PolynomialFamily& f) {
    return std::visit(
        [](const auto& k) -> json {
            using K = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<K, Monomials>)
                return {{"kind", "monomials"}, {"max_degree", k.max_degree}, {"stride", k.stride}};
            else if constexpr (std::is_same_v<K, CesaroMeans>)
                return {{"kind", "cesaro"}, {"max_degree", k.max_degree}};
            else if constexpr (std::is_same_v<K, SimplexGrid>)
                return {{"kind", "simplex_grid"}, {"degree", k.degree}, {"resolution", k.resolution}};
            else if constexpr (std::is_same_v<K, RandomSimplex>)
                return {{"kind", "random_simplex"}, {"degree", k.degree}, {"count", k.count}, {"seed", k.seed}};
            else
                return {{"kind", "explicit"}, {"members", polys_to(k.members)}};
        },
        f.kind);
}

template <Scalar S>
json to_json(const Experiment<S>& e) {
    json j;
    j["version"] = e.version;
    if (!e.name.empty()) j["name"] = e.name;
    if (!e.description.empty()) j["description"] = e.description;
    j["scalar_field"] = std::string(to_string(field_of<S>()));
    j["dim"] = e.dim;
    j["p"] = e.p;
    j["operator"] = operator_to(e.op);
    j["subspace"] = subspace_to(e.subspace);
    if (e.family) j["family"] = family_to_json(*e.family);
    j["tolerances"] = {{"membership", e.tolerances.membership},
                       {"convergence", e.tolerances.convergence},
                       {"epsilon", e.tolerances.epsilon}};
    j["horizon"] = e.horizon;
    if (e.seed) j["seed"] = *e.seed;
    j["options"] = {{"allow_signed_coefficients", e.options.allow_signed_coefficients},
                    {"overflow", e.options.overflow == OverflowPolicy::Error ? "error" : "auto_grow"},
                    {"grow_cap", e.options.grow_cap},
                    {"include_outside", e.options.include_outside},
                    {"threads", e.options.threads}};
    if (e.criterion) {
        const auto& c = *e.criterion;
        json cj;
        cj["X"] = vectors_to(c.X);
        cj["Y"] = vectors_to(c.Y);
        cj["polys"] = sequence_to(c.polys);
        if (c.recovery) cj["recovery"] = recovery_to(*c.recovery);
        if (!c.recovery_by_index.empty()) {
            json arr = json::array();
            for (const auto& [idx, rule] : c.recovery_by_index)
                arr.push_back({{"index", idx}, {"rule", recovery_to(rule)}});
            cj["recovery_by_index"] = arr;
        }
        j["criterion"] = cj;
    }
    if (e.density) {
        json dj;
        if (const auto* v = std::get_if<TruncVector<S>>(&e.density->candidate)) dj["candidate"] = vector_to_json(*v);
        else dj["candidate"] = "build";
        if (const auto* t = std::get_if<std::vector<TruncVector<S>>>(&e.density->targets)) dj["targets"] = vectors_to(*t);
        else if (std::holds_alternative<TargetsFromY>(e.density->targets)) dj["targets"] = "Y";
        else dj["targets"] = {{"sample", std::get<SampledTargets>(e.density->targets).count}};
        j["density"] = dj;
    }
    if (e.transitivity) {
        json arr = json::array();
        for (const auto& pr : e.transitivity->pairs)
            arr.push_back({{"u_center", vector_to_json(pr.u_center)},
                           {"v_center", vector_to_json(pr.v_center)},
                           {"radius", pr.radius}});
        j["transitivity"] = {{"pairs", arr}, {"samples_per_ball", e.transitivity->samples_per_ball}};
    }
    if (e.build) j["build"] = {{"j_max", e.build->j_max}, {"c", e.build->c}, {"k_step", e.build->k_step}};
    if (e.screen) {
        json sj = {{"horizon", e.screen->horizon}, {"growth_threshold", e.screen->growth_threshold}};
        if (e.screen->block) sj["block"] = position_to(*e.screen->block);
        j["screen"] = sj;
    }
    if (!e.expected.empty()) j["expected"] = expected_to(e.expected);
    return j;
}

json to_json(const AnyExperiment& e) {
    return std::visit([](const auto& x) { return to_json(x); }, e);
}

namespace {

void format_into(std::string& out, const json& j, std::size_t depth) {
    constexpr std::size_t kInlineWidth = 96;
    const std::string flat = j.dump();
    if (!j.is_structured() || j.empty() || (j.is_array() && flat.size() + 2 * depth <= kInlineWidth)) {
        out += flat;
        return;
    }
    const std::string pad(2 * (depth + 1), ' ');
    out += j.is_array() ? "[\n" : "{\n";
    bool first = true;
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += pad;
        if (j.is_object()) out += json(it.key()).dump() + ": ";
        format_into(out, *it, depth + 1);
    }
    out += "\n" + std::string(2 * depth, ' ') + (j.is_array() ? "]" : "}");
}

}  // namespace

std::string format_config(const json& j) {
    std::string out;
    format_into(out, j, 0);
    return out + "\n";
}

AnyExperiment parse_experiment(const json& j) {
    require_object(j, "");
    const auto field_name = has(j, "scalar_field") ? as_string(j["scalar_field"], "scalar_field") : "real";
    if (field_name == "real") return experiment_from<double>(j);
    if (field_name == "complex") return experiment_from<Complex>(j);
    config_fail("scalar_field", "expected 'real' or 'complex'");
}

AnyExperiment load_experiment(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::ConfigError, "cannot open config file " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        fail(ErrorCode::ConfigError, path.string() + ": " + e.what());
    }
    return parse_experiment(j);
}

template struct Experiment<double>;
template struct Experiment<Complex>;
template json to_json(const Experiment<double>&);
template json to_json(const Experiment<Complex>&);
template json vector_to_json(const TruncVector<double>&);
template json vector_to_json(const TruncVector<Complex>&);

}  // namespace cclab
