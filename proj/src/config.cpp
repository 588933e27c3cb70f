#include "chemolab/config.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "chemolab/errors.hpp"

namespace chemolab {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(trim(item));
    return out;
}

struct Entry {
    std::string value;
    int line;
};

/// One bracketed section with its keys; keys are erased as they are consumed
/// so whatever remains is reported as unknown.
class Section {
public:
    Section(std::string name, int line) : name_(std::move(name)), line_(line) {}

    const std::string& name() const { return name_; }
    int line() const { return line_; }

    void add(const std::string& key, std::string value, int line) {
        if (!entries_.emplace(key, Entry{std::move(value), line}).second)
            throw ParseError(line, "duplicate key '" + key + "' in [" + name_ + "]");
    }

    bool has(const std::string& key) const { return entries_.count(key) != 0; }

    std::optional<std::string> take(const std::string& key) {
        const auto it = entries_.find(key);
        if (it == entries_.end()) return std::nullopt;
        std::string v = it->second.value;
        entries_.erase(it);
        return v;
    }

    std::string qualified(const std::string& key) const { return name_ + "." + key; }

    double number(const std::string& key, const std::string& text) const {
        const char* begin = text.c_str();
        char* end = nullptr;
        errno = 0;
        const double v = std::strtod(begin, &end);
        if (text.empty() || end != begin + text.size() || errno == ERANGE || !std::isfinite(v))
            throw ValidationError(qualified(key), "not a finite number: '" + text + "'");
        return v;
    }

    void real(const std::string& key, double& out) {
        if (auto v = take(key)) out = number(key, *v);
    }
    void real(const std::string& key, std::optional<double>& out) {
        if (auto v = take(key)) out = number(key, *v);
    }

    long long integer(const std::string& key, const std::string& text) const {
        const double v = number(key, text);
        if (v != std::floor(v) || std::abs(v) > 9e15) throw ValidationError(qualified(key), "not an integer");
        return static_cast<long long>(v);
    }

    template <class Int>
    void count(const std::string& key, Int& out, long long min_value = 0) {
        if (auto v = take(key)) {
            const long long n = integer(key, *v);
            if (n < min_value)
                throw ValidationError(qualified(key), "must be at least " + std::to_string(min_value));
            out = static_cast<Int>(n);
        }
    }

    std::vector<double> reals(const std::string& key, const std::string& text) const {
        std::vector<double> out;
        for (const auto& item : split_list(text)) out.push_back(number(key, item));
        return out;
    }

    void boolean(const std::string& key, bool& out) {
        if (auto v = take(key)) {
            if (*v == "true" || *v == "1")
                out = true;
            else if (*v == "false" || *v == "0")
                out = false;
            else
                throw ValidationError(qualified(key), "expected true or false");
        }
    }

    /// Every key left over is unknown.
    void finish() const {
        if (!entries_.empty()) {
            const auto& [key, e] = *entries_.begin();
            throw ValidationError(qualified(key), "unknown key (line " + std::to_string(e.line) + ")");
        }
    }

private:
    std::string name_;
    int line_;
    std::map<std::string, Entry> entries_;
};

std::vector<Section> tokenize(std::istream& in) {
    std::vector<Section> sections;
    std::set<std::string> seen;
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::string s = raw;
        if (const auto hash = s.find_first_of("#;"); hash != std::string::npos) s.erase(hash);
        s = trim(s);
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']') throw ParseError(line, "unterminated section header");
            std::string name = trim(s.substr(1, s.size() - 2));
            if (name.empty()) throw ParseError(line, "empty section name");
            if (!seen.insert(name).second) throw ParseError(line, "duplicate section [" + name + "]");
            sections.emplace_back(name, line);
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw ParseError(line, "expected key = value");
        if (sections.empty()) throw ParseError(line, "key outside of any section");
        const std::string key = trim(s.substr(0, eq));
        if (key.empty()) throw ParseError(line, "empty key");
        sections.back().add(key, trim(s.substr(eq + 1)), line);
    }
    return sections;
}

EntireOptions read_entire_options(Section& s, EntireOptions o) {
    s.real("dt", o.dt);
    if (auto v = s.take("scheme")) o.scheme = parse_scheme(*v);
    if (auto v = s.take("flux")) o.flux = parse_flux(*v);
    s.real("start_fraction", o.start_fraction);
    s.real("sample_spacing", o.sample_spacing);
    s.real("tol", o.tol);
    s.count("max_iterations", o.max_iterations, 1);
    s.real("max_time", o.max_time);
    if (!(o.dt > 0.0)) throw ValidationError(s.qualified("dt"), "must be positive");
    if (!(o.start_fraction > 0.0)) throw ValidationError(s.qualified("start_fraction"), "must be positive");
    if (!(o.sample_spacing > 0.0)) throw ValidationError(s.qualified("sample_spacing"), "must be positive");
    if (!(o.tol > 0.0)) throw ValidationError(s.qualified("tol"), "must be positive");
    return o;
}

std::array<int, 2> read_mode(Section& s, const std::string& key, const std::string& text) {
    const auto items = s.reals(key, text);
    if (items.empty() || items.size() > 2) throw ValidationError(s.qualified(key), "expects one or two integers");
    std::array<int, 2> m{0, 0};
    for (std::size_t k = 0; k < items.size(); ++k) {
        if (items[k] < 0 || items[k] != std::floor(items[k]))
            throw ValidationError(s.qualified(key), "mode entries must be nonnegative integers");
        m[k] = static_cast<int>(items[k]);
    }
    return m;
}

CoefficientTerm read_term(Section& s) {
    const std::string kind = s.take("kind").value_or("constant");
    double amplitude = 1.0;
    s.real("amplitude", amplitude);
    std::array<int, 2> mode{0, 0};
    if (auto v = s.take("mode")) mode = read_mode(s, "mode", *v);
    const auto omega_text = s.take("omega");
    const auto phase_text = s.take("phase");
    const auto weights_text = s.take("weights");
    if (kind == "constant") {
        if (omega_text || phase_text || weights_text)
            throw ValidationError(s.qualified(omega_text ? "omega" : phase_text ? "phase" : "weights"),
                                  "not used by a constant term");
        return CoefficientTerm::constant(amplitude, mode);
    }
    if (!omega_text) throw ValidationError(s.qualified("omega"), "required for kind " + kind);
    const auto omegas = s.reals("omega", *omega_text);
    const auto phases = phase_text ? s.reals("phase", *phase_text) : std::vector<double>{};
    if (kind == "cosine") {
        if (omegas.size() != 1 || phases.size() > 1)
            throw ValidationError(s.qualified("omega"), "cosine terms take a single omega and phase");
        if (weights_text) throw ValidationError(s.qualified("weights"), "not used by a cosine term");
        return CoefficientTerm::cosine(amplitude, omegas[0], phases.empty() ? 0.0 : phases[0], mode);
    }
    if (kind == "almost_periodic") {
        const auto weights = weights_text ? s.reals("weights", *weights_text) : std::vector<double>{};
        if (phases.size() > omegas.size() || weights.size() > omegas.size())
            throw ValidationError(s.qualified("phase"), "more phases or weights than frequencies");
        std::vector<Harmonic> hs;
        for (std::size_t k = 0; k < omegas.size(); ++k)
            hs.push_back({amplitude * (k < weights.size() ? weights[k] : 1.0), omegas[k],
                          k < phases.size() ? phases[k] : 0.0});
        return CoefficientTerm::almost_periodic(std::move(hs), mode);
    }
    throw ValidationError(s.qualified("kind"), "unknown term kind '" + kind + "'");
}

InitialFieldSpec read_u0(Section& s) {
    InitialFieldSpec spec;
    const std::string kind = s.take("kind").value_or("constant");
    if (kind == "constant")
        spec.kind = InitialFieldSpec::Kind::constant;
    else if (kind == "cosine_perturbation")
        spec.kind = InitialFieldSpec::Kind::cosine_perturbation;
    else if (kind == "random_positive")
        spec.kind = InitialFieldSpec::Kind::random_positive;
    else if (kind == "file")
        spec.kind = InitialFieldSpec::Kind::file;
    else
        throw ValidationError(s.qualified("kind"), "unknown initial field kind '" + kind + "'");
    s.real("value", spec.value);
    s.real("base", spec.base);
    s.real("amplitude", spec.amplitude);
    if (auto v = s.take("mode")) spec.mode = read_mode(s, "mode", *v);
    s.real("lo", spec.lo);
    s.real("hi", spec.hi);
    if (auto v = s.take("seed")) spec.seed = static_cast<std::uint64_t>(s.integer("seed", *v));
    if (auto v = s.take("path")) spec.path = *v;
    if (spec.kind == InitialFieldSpec::Kind::file && spec.path.empty())
        throw ValidationError(s.qualified("path"), "required for kind file");
    if (spec.kind == InitialFieldSpec::Kind::random_positive && !(0.0 <= spec.lo && spec.lo <= spec.hi))
        throw ValidationError(s.qualified("lo"), "need 0 <= lo <= hi");
    return spec;
}

SweepAxis read_axis(Section& s, const std::string& name) {
    static const std::set<std::string> allowed{"chi", "a1_base", "a2_base", "n"};
    if (!allowed.count(name)) throw ValidationError(s.qualified("axes"), "unknown sweep axis '" + name + "'");
    SweepAxis axis{name, {}};
    const auto list = s.take(name);
    const auto range = s.take(name + "_range");
    if (list && range) throw ValidationError(s.qualified(name), "give either a list or a range");
    if (list) axis.values = s.reals(name, *list);
    if (range) {
        const auto r = s.reals(name + "_range", *range);
        if (r.size() != 3 || r[2] < 1 || r[2] != std::floor(r[2]))
            throw ValidationError(s.qualified(name + "_range"), "expects lo, hi, count");
        const auto n = static_cast<std::size_t>(r[2]);
        for (std::size_t k = 0; k < n; ++k)
            axis.values.push_back(n == 1 ? r[0] : r[0] + (r[1] - r[0]) * static_cast<double>(k) / static_cast<double>(n - 1));
    }
    if (axis.values.empty()) throw ValidationError(s.qualified(name), "axis needs values");
    if (name == "n")
        for (double v : axis.values)
            if (v < 1 || v != std::floor(v)) throw ValidationError(s.qualified(name), "dimension must be a positive integer");
    return axis;
}

}  // namespace

Scheme parse_scheme(const std::string& s) {
    if (s == "imex_euler") return Scheme::imex_euler;
    if (s == "ars222") return Scheme::ars222;
    throw ValidationError("scheme", "unknown scheme '" + s + "'");
}

const char* to_string(Scheme s) { return s == Scheme::ars222 ? "ars222" : "imex_euler"; }

FluxScheme parse_flux(const std::string& s) {
    if (s == "central") return FluxScheme::central;
    if (s == "upwind") return FluxScheme::upwind;
    throw ValidationError("flux", "unknown flux scheme '" + s + "'");
}

const char* to_string(FluxScheme f) { return f == FluxScheme::upwind ? "upwind" : "central"; }

void ScenarioConfig::require(const std::string& command) const {
    auto need = [&](bool present, const char* block) {
        if (!present) throw MissingBlock("command '" + command + "' needs a [" + block + "] block");
    };
    if (command == "simulate") {
        need(simulate.has_value(), "simulate");
        need(u0.has_value(), "u0");
    } else if (command == "envelope") {
        need(envelope.has_value(), "envelope");
        need(u0.has_value(), "u0");
    } else if (command == "entire") {
        need(entire.has_value(), "entire");
    } else if (command == "periodic") {
        need(periodic.has_value(), "periodic");
    } else if (command == "steady") {
        need(steady.has_value(), "steady");
    } else if (command == "sweep") {
        need(sweep.has_value(), "sweep");
        need(u0.has_value(), "u0");
    }
}

ScenarioConfig parse_config(std::istream& in, const std::string& base_dir) {
    auto sections = tokenize(in);
    ScenarioConfig cfg;
    std::map<std::string, Section*> by_name;
    for (auto& s : sections) by_name[s.name()] = &s;
    auto find = [&](const std::string& name) -> Section* {
        const auto it = by_name.find(name);
        return it == by_name.end() ? nullptr : it->second;
    };

    static const std::set<std::string> known{"scenario", "grid",   "params",   "horizon", "bounds",
                                             "controller", "u0",   "simulate", "envelope", "entire",
                                             "periodic",  "steady", "sweep"};
    for (const auto& s : sections) {
        const std::string& n = s.name();
        const bool coefficient = n.size() >= 2 && n[0] == 'a' && (n[1] == '0' || n[1] == '1' || n[1] == '2') &&
                                 (n.size() == 2 || n[2] == '.');
        if (!known.count(n) && !coefficient) throw ValidationError(n, "unknown section (line " + std::to_string(s.line()) + ")");
    }

    if (Section* s = find("scenario")) {
        if (auto v = s->take("name")) cfg.name = *v;
        if (auto v = s->take("out_dir")) cfg.out_dir = *v;
        if (auto v = s->take("seed")) {
            const long long seed = s->integer("seed", *v);
            if (seed < 0) throw ValidationError("scenario.seed", "must be nonnegative");
            cfg.seed = static_cast<std::uint64_t>(seed);
        }
        s->real("min_window", cfg.min_window);
        s->finish();
    }

    Section* grid = find("grid");
    if (!grid) throw MissingBlock("config needs a [grid] block");
    {
        long long dim = 1;
        if (auto v = grid->take("dim")) dim = grid->integer("dim", *v);
        if (dim != 1 && dim != 2) throw ValidationError("grid.dim", "must be 1 or 2");
        const auto lengths_text = grid->take("lengths");
        const auto counts_text = grid->take("counts");
        if (!counts_text) throw ValidationError("grid.counts", "required");
        const auto lengths = lengths_text ? grid->reals("lengths", *lengths_text) : std::vector<double>(dim, 1.0);
        const auto counts = grid->reals("counts", *counts_text);
        if (lengths.size() != static_cast<std::size_t>(dim))
            throw ValidationError("grid.lengths", "expects " + std::to_string(dim) + " value(s)");
        if (counts.size() != static_cast<std::size_t>(dim))
            throw ValidationError("grid.counts", "expects " + std::to_string(dim) + " value(s)");
        for (double L : lengths)
            if (!(L > 0.0)) throw ValidationError("grid.lengths", "must be positive");
        for (double n : counts)
            if (n < static_cast<double>(Grid::min_cells) || n != std::floor(n))
                throw ValidationError("grid.counts", "must be integers of at least " + std::to_string(Grid::min_cells));
        cfg.params.grid = dim == 1 ? Grid::line(lengths[0], static_cast<std::size_t>(counts[0]))
                                   : Grid::rectangle(lengths[0], lengths[1], static_cast<std::size_t>(counts[0]),
                                                     static_cast<std::size_t>(counts[1]));
        cfg.params.dim_n = static_cast<int>(dim);
        grid->finish();
    }

    if (Section* s = find("params")) {
        s->real("chi", cfg.params.chi);
        s->count("dim_n", cfg.params.dim_n, 1);
        s->finish();
    }

    if (Section* s = find("horizon")) {
        s->real("t_lo", cfg.params.horizon.t_lo);
        s->real("t_hi", cfg.params.horizon.t_hi);
        s->real("sample_step", cfg.params.horizon.sample_step);
        s->finish();
    }
    try {
        cfg.params.horizon.validate();
    } catch (const Error& e) {
        throw ValidationError("horizon", e.what());
    }

    // Coefficients: [a0], [a0.<label>], ... each holding one term.
    const Grid& g = cfg.params.grid;
    cfg.params.triple = CoefficientTriple{};
    cfg.params.triple.lengths = {g.length(0), g.dim() == 2 ? g.length(1) : 1.0};
    std::array<bool, 3> present{false, false, false};
    for (auto& s : sections) {
        const std::string& n = s.name();
        if (n.size() < 2 || n[0] != 'a' || !(n.size() == 2 || n[2] == '.')) continue;
        const int which = n[1] - '0';
        if (which < 0 || which > 2) continue;
        cfg.params.triple[which].terms.push_back(read_term(s));
        present[static_cast<std::size_t>(which)] = true;
        s.finish();
    }
    if (!present[0]) throw MissingBlock("config needs an [a0] block");
    if (!present[1]) throw MissingBlock("config needs an [a1] block");

    if (Section* s = find("bounds")) {
        DeclaredBounds b{};
        const std::pair<const char*, double*> keys[] = {{"alpha0", &b.alpha0}, {"A0", &b.A0}, {"alpha1", &b.alpha1},
                                                        {"A1", &b.A1},         {"alpha2", &b.alpha2}, {"A2", &b.A2}};
        for (const auto& [key, ptr] : keys) {
            if (!s->has(key)) throw ValidationError(s->qualified(key), "required in [bounds]");
            s->real(key, *ptr);
        }
        cfg.params.triple.declared_bounds = b;
        s->finish();
    }

    if (Section* s = find("controller")) {
        StepController& c = cfg.controller;
        s->real("dt_init", c.dt_init);
        s->real("dt_min", c.dt_min);
        s->real("dt_max", c.dt_max);
        s->real("safety", c.safety);
        s->real("growth_cap", c.growth_cap);
        s->real("negativity_tol", c.negativity_tol);
        s->real("blowup_threshold", c.blowup_threshold);
        if (auto v = s->take("scheme")) c.scheme = parse_scheme(*v);
        if (auto v = s->take("flux")) c.flux = parse_flux(*v);
        s->count("grow_after", c.grow_after, 1);
        s->finish();
    }
    try {
        cfg.controller.validate();
    } catch (const Error& e) {
        throw ValidationError("controller", e.what());
    }

    if (Section* s = find("u0")) {
        cfg.u0 = read_u0(*s);
        if (cfg.u0->kind == InitialFieldSpec::Kind::file) {
            const std::filesystem::path p(cfg.u0->path);
            if (p.is_relative()) cfg.u0->path = (std::filesystem::path(base_dir) / p).string();
        }
        s->finish();
    }

    if (Section* s = find("simulate")) {
        SimulateBlock b;
        s->real("t0", b.t0);
        s->real("t_end", b.t_end);
        s->count("stride", b.stride, 1);
        s->boolean("snapshots", b.snapshots);
        if (!(b.t_end > b.t0)) throw ValidationError("simulate.t_end", "must exceed t0");
        cfg.simulate = b;
        s->finish();
    }

    if (Section* s = find("envelope")) {
        EnvelopeBlock b;
        s->real("t0", b.t0);
        s->real("t_end", b.t_end);
        s->real("u_bar0", b.u_bar0);
        s->real("u_under0", b.u_under0);
        if (!(b.t_end > b.t0)) throw ValidationError("envelope.t_end", "must exceed t0");
        cfg.envelope = b;
        s->finish();
    }

    if (Section* s = find("entire")) {
        EntireBlock b;
        if (auto v = s->take("method")) {
            if (*v == "auto")
                b.method = EntireBlock::Method::automatic;
            else if (*v == "pullback")
                b.method = EntireBlock::Method::pullback;
            else if (*v == "homogeneous")
                b.method = EntireBlock::Method::homogeneous;
            else
                throw ValidationError("entire.method", "expected auto, pullback or homogeneous");
        }
        s->count("n_max", b.n_max, 1);
        s->real("window", b.window);
        if (!(b.window > 0.0)) throw ValidationError("entire.window", "must be positive");
        b.opts = read_entire_options(*s, b.opts);
        cfg.entire = b;
        s->finish();
    }

    if (Section* s = find("periodic")) {
        PeriodicBlock b;
        s->real("T", b.T);
        if (b.T && !(*b.T > 0.0)) throw ValidationError("periodic.T", "must be positive");
        b.opts = read_entire_options(*s, b.opts);
        cfg.periodic = b;
        s->finish();
    }

    if (Section* s = find("steady")) {
        SteadyBlock b;
        s->real("tol", b.tol);
        b.opts = read_entire_options(*s, b.opts);
        cfg.steady = b;
        s->finish();
    }

    if (Section* s = find("sweep")) {
        SweepBlock b;
        const auto axes = s->take("axes");
        if (!axes) throw ValidationError("sweep.axes", "required");
        const auto names = split_list(*axes);
        if (names.empty() || names.size() > 2) throw ValidationError("sweep.axes", "expects one or two axes");
        if (names.size() == 2 && names[0] == names[1]) throw ValidationError("sweep.axes", "axes must differ");
        for (const auto& n : names) b.axes.push_back(read_axis(*s, n));
        s->real("t0", b.t0);
        s->real("t_end", b.t_end);
        s->count("stride", b.stride, 1);
        if (!(b.t_end > b.t0)) throw ValidationError("sweep.t_end", "must exceed t0");
        cfg.sweep = b;
        s->finish();
    }

    return cfg;
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("config", "cannot open '" + path + "'");
    const auto parent = std::filesystem::path(path).parent_path();
    return parse_config(in, parent.empty() ? "." : parent.string());
}

}  // namespace chemolab
