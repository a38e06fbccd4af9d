#include "fracflow/case.hpp"

#include "fracflow/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#ifndef FRACFLOW_DATA_DIR
#define FRACFLOW_DATA_DIR "data"
#endif

namespace fracflow {

namespace {

using units::Dimension;

std::string_view trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_ws(std::string_view s)
{
    std::vector<std::string> out;
    std::istringstream in{std::string(s)};
    std::string tok;
    while (in >> tok)
        out.push_back(tok);
    return out;
}

struct Entry {
    std::string key;
    std::string value;
    int line;
    bool used = false;
};

struct Section {
    std::string kind;
    std::string label;
    int line;
    std::vector<Entry> entries;
};

std::vector<Section> tokenize(std::istream& in, const std::string& source)
{
    std::vector<Section> sections;
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = raw;
        if (const auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        const std::string where = source + ":" + std::to_string(line_no);
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError(where, "unterminated section header");
            const auto words = split_ws(line.substr(1, line.size() - 2));
            if (words.empty() || words.size() > 2)
                throw ConfigError(where, "section header needs a name and optional label");
            sections.push_back({words[0], words.size() == 2 ? words[1] : "", line_no, {}});
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError(where, "expected 'key = value'");
        if (sections.empty())
            throw ConfigError(where, "entry outside of any section");
        const std::string key{trim(line.substr(0, eq))};
        const std::string value{trim(line.substr(eq + 1))};
        if (key.empty() || value.empty())
            throw ConfigError(where, "empty key or value");
        sections.back().entries.push_back({key, value, line_no});
    }
    return sections;
}

// Typed access to one section; remembers which keys were consumed.
class Reader {
public:
    explicit Reader(Section& s) : s_(s) {}

    std::string path(const std::string& key) const { return s_.kind + "." + key; }

    const Entry* find(const std::string& key)
    {
        const Entry* hit = nullptr;
        for (auto& e : s_.entries) {
            if (e.key != key)
                continue;
            if (hit)
                throw ConfigError(path(key), "duplicate key (line " + std::to_string(e.line) + ")");
            e.used = true;
            hit = &e;
        }
        return hit;
    }

    std::vector<const Entry*> all(const std::string& key)
    {
        std::vector<const Entry*> out;
        for (auto& e : s_.entries)
            if (e.key == key) {
                e.used = true;
                out.push_back(&e);
            }
        return out;
    }

    double quantity(const std::string& key, Dimension dim, double fallback)
    {
        const Entry* e = find(key);
        return e ? as_quantity(key, e->value, dim) : fallback;
    }

    double required_quantity(const std::string& key, Dimension dim)
    {
        const Entry* e = find(key);
        if (!e)
            throw ConfigError(path(key), "missing required key");
        return as_quantity(key, e->value, dim);
    }

    int integer(const std::string& key, int fallback)
    {
        const Entry* e = find(key);
        return e ? as_int(key, e->value) : fallback;
    }

    std::uint64_t seed(const std::string& key, std::uint64_t fallback)
    {
        const Entry* e = find(key);
        if (!e)
            return fallback;
        std::uint64_t v = 0;
        const auto& t = e->value;
        const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
        if (ec != std::errc{} || p != t.data() + t.size())
            throw ConfigError(path(key), "expected a non-negative integer, got '" + t + "'");
        return v;
    }

    std::string text(const std::string& key, const std::string& fallback)
    {
        const Entry* e = find(key);
        return e ? e->value : fallback;
    }

    bool boolean(const std::string& key, bool fallback)
    {
        const Entry* e = find(key);
        if (!e)
            return fallback;
        if (e->value == "true" || e->value == "yes" || e->value == "1")
            return true;
        if (e->value == "false" || e->value == "no" || e->value == "0")
            return false;
        throw ConfigError(path(key), "expected true or false, got '" + e->value + "'");
    }

    // "a b c unit": numbers sharing one trailing unit.
    std::vector<double> list(const std::string& key, const std::string& value, Dimension dim,
                             std::size_t count)
    {
        auto words = split_ws(value);
        std::string unit;
        if (words.size() == count + 1) {
            unit = words.back();
            words.pop_back();
        }
        if (words.size() != count)
            throw ConfigError(path(key), "expected " + std::to_string(count) + " values");
        std::vector<double> out;
        for (const auto& w : words)
            out.push_back(as_quantity(key, unit.empty() ? w : w + " " + unit, dim));
        return out;
    }

    std::vector<int> int_list(const std::string& key, const std::string& value)
    {
        std::vector<int> out;
        for (const auto& w : split_ws(value))
            out.push_back(as_int(key, w));
        return out;
    }

    double as_quantity(const std::string& key, const std::string& value, Dimension dim)
    {
        try {
            return units::parse_quantity(value, dim);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(path(key), e.what());
        }
    }

    int as_int(const std::string& key, const std::string& t)
    {
        int v = 0;
        const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
        if (ec != std::errc{} || p != t.data() + t.size())
            throw ConfigError(path(key), "expected an integer, got '" + t + "'");
        return v;
    }

    void finish() const
    {
        for (const auto& e : s_.entries)
            if (!e.used)
                throw ConfigError(path(e.key), "unknown key");
    }

private:
    Section& s_;
};

void read_grid(Reader& r, CaseConfig& c)
{
    const Entry* dims = r.find("dims");
    if (!dims)
        throw ConfigError(r.path("dims"), "missing required key");
    const auto d = r.int_list("dims", dims->value);
    if (d.size() != 2 && d.size() != 3)
        throw ConfigError(r.path("dims"), "expected nx ny [nz]");
    c.dims = {d[0], d[1], d.size() == 3 ? d[2] : 1};
    for (int n : c.dims)
        if (n <= 0)
            throw ConfigError(r.path("dims"), "cell counts must be positive");

    const Entry* ext = r.find("extent");
    if (!ext)
        throw ConfigError(r.path("extent"), "missing required key");
    const auto e = r.list("extent", ext->value, Dimension::length, 3);
    c.extent = {e[0], e[1], e[2]};
    for (double x : c.extent)
        if (!(x > 0.0))
            throw ConfigError(r.path("extent"), "extent must be positive");
}

void read_rock(Reader& r, CaseConfig& c)
{
    auto& rock = c.rock;
    rock.porosity = r.quantity("porosity", Dimension::dimensionless, rock.porosity);
    rock.permeability = r.quantity("perm", Dimension::permeability, rock.permeability);
    rock.log_sigma = r.quantity("perm_log_sigma", Dimension::dimensionless, rock.log_sigma);
    rock.correlation_cells =
        r.quantity("perm_correlation", Dimension::dimensionless, rock.correlation_cells);
    rock.seed = r.seed("perm_seed", rock.seed);
    if (const auto f = r.text("perm_file", ""); !f.empty())
        rock.perm_file = c.base_dir / f;
    if (!(rock.porosity > 0.0 && rock.porosity <= 1.0))
        throw ConfigError(r.path("porosity"), "must lie in (0, 1]");
    if (!(rock.permeability > 0.0))
        throw ConfigError(r.path("perm"), "must be positive");
    if (rock.log_sigma < 0.0)
        throw ConfigError(r.path("perm_log_sigma"), "must be non-negative");
    if (!rock.perm_file.empty() && !std::filesystem::exists(rock.perm_file))
        throw ConfigError(r.path("perm_file"), "file not found: " + rock.perm_file.string());
}

void read_fractures(Reader& r, CaseConfig& c)
{
    auto& fr = c.fractures;
    fr.porosity = r.quantity("porosity", Dimension::dimensionless, fr.porosity);
    if (const auto f = r.text("file", ""); !f.empty())
        fr.file = c.base_dir / f;
    fr.target_cells = r.integer("target_cells", 0);

    const bool generated = r.find("seed") != nullptr || r.find("count") != nullptr;
    if (generated) {
        if (!fr.file.empty())
            throw ConfigError(r.path("file"), "give either a file or generator settings");
        NetworkGeneratorParams g;
        g.seed = r.seed("seed", g.seed);
        g.count = r.integer("count", g.count);
        g.domain = {c.extent[0], c.extent[1]};
        g.length_median = r.quantity("length_median", Dimension::length, g.length_median);
        g.length_log_sigma =
            r.quantity("length_log_sigma", Dimension::dimensionless, g.length_log_sigma);
        g.length_min = r.quantity("length_min", Dimension::length, g.length_min);
        g.length_max = r.quantity("length_max", Dimension::length, g.length_max);
        g.aperture = r.quantity("aperture", Dimension::length, g.aperture);
        g.permeability = r.quantity("perm", Dimension::permeability, g.permeability);
        g.porosity = fr.porosity;
        if (const auto sets = r.all("set"); !sets.empty()) {
            g.sets.clear();
            for (const auto* e : sets) {
                const auto v = split_ws(e->value);
                if (v.size() != 2 && v.size() != 3)
                    throw ConfigError(r.path("set"), "expected 'angle spread [weight]'");
                g.sets.push_back({r.as_quantity("set", v[0], Dimension::dimensionless),
                                  r.as_quantity("set", v[1], Dimension::dimensionless),
                                  v.size() == 3 ? r.as_quantity("set", v[2], Dimension::dimensionless)
                                                : 1.0});
            }
        }
        if (g.count < 0)
            throw ConfigError(r.path("count"), "must be non-negative");
        if (!(g.aperture > 0.0))
            throw ConfigError(r.path("aperture"), "must be positive");
        fr.generator = g;
    } else if (!fr.file.empty() && !std::filesystem::exists(fr.file)) {
        throw ConfigError(r.path("file"), "file not found: " + fr.file.string());
    }
    if (!(fr.porosity > 0.0 && fr.porosity <= 1.0))
        throw ConfigError(r.path("porosity"), "must lie in (0, 1]");
}

void read_fluid(Reader& r, FluidModel& f)
{
    f.mu_w = r.quantity("mu_w", Dimension::viscosity, f.mu_w);
    f.mu_o = r.quantity("mu_o", Dimension::viscosity, f.mu_o);
    f.c_w = r.quantity("c_w", Dimension::compressibility, f.c_w);
    f.c_o = r.quantity("c_o", Dimension::compressibility, f.c_o);
    f.rho_w_ref = r.quantity("rho_w", Dimension::density, f.rho_w_ref);
    f.rho_o_ref = r.quantity("rho_o", Dimension::density, f.rho_o_ref);
    f.p_ref = r.quantity("p_ref", Dimension::pressure, f.p_ref);
    f.n_w = r.quantity("n_w", Dimension::dimensionless, f.n_w);
    f.n_o = r.quantity("n_o", Dimension::dimensionless, f.n_o);
    f.krw_max = r.quantity("krw_max", Dimension::dimensionless, f.krw_max);
    f.kro_max = r.quantity("kro_max", Dimension::dimensionless, f.kro_max);
    f.s_wr = r.quantity("s_wr", Dimension::dimensionless, f.s_wr);
    f.s_or = r.quantity("s_or", Dimension::dimensionless, f.s_or);
    try {
        f.validate();
    } catch (const Error& e) {
        throw ConfigError("fluid", e.what());
    }
}

WellConfig read_well(Reader& r, const std::string& name)
{
    WellConfig w;
    w.name = name;
    const auto type = r.text("type", "");
    if (type == "injector")
        w.kind = WellKind::injector;
    else if (type == "producer")
        w.kind = WellKind::producer;
    else
        throw ConfigError(r.path("type"), "expected injector or producer, got '" + type + "'");

    const auto control = r.text("control", "rate");
    if (control == "rate")
        w.control = WellControl::rate;
    else if (control == "bhp")
        w.control = WellControl::bhp;
    else
        throw ConfigError(r.path("control"), "expected rate or bhp, got '" + control + "'");

    w.rate = r.quantity("rate", Dimension::rate, 0.0);
    w.rate_pv = r.quantity("rate_pv", Dimension::dimensionless, 0.0);
    w.rate_pv_period = r.quantity("rate_pv_period", Dimension::time, 0.0);
    w.bhp = r.quantity("bhp", Dimension::pressure, w.bhp);
    w.radius = r.quantity("radius", Dimension::length, w.radius);

    const Entry* loc = r.find("location");
    if (!loc)
        throw ConfigError(r.path("location"), "missing required key");
    const auto ij = r.int_list("location", loc->value);
    if (ij.size() != 2)
        throw ConfigError(r.path("location"), "expected 'i j'");
    w.i = ij[0];
    w.j = ij[1];
    if (const Entry* layers = r.find("layers")) {
        const auto k = r.int_list("layers", layers->value);
        if (k.size() != 2)
            throw ConfigError(r.path("layers"), "expected 'k_top k_bottom'");
        w.k_top = k[0];
        w.k_bottom = k[1];
    }
    if (w.control == WellControl::rate && !(w.rate > 0.0) && !(w.rate_pv > 0.0))
        throw ConfigError(r.path("rate"), "rate-controlled well needs rate or rate_pv");
    if (w.rate < 0.0 || w.rate_pv < 0.0 || w.rate_pv_period < 0.0)
        throw ConfigError(r.path("rate"), "rates are magnitudes and must be non-negative");
    if (!(w.radius > 0.0))
        throw ConfigError(r.path("radius"), "must be positive");
    return w;
}

void read_schedule(Reader& r, CaseConfig& c)
{
    auto& s = c.schedule;
    auto& cfg = c.solver;
    s.total_time = r.quantity("total_time", Dimension::time, s.total_time);
    cfg.dt_target = r.quantity("dt_target", Dimension::time, cfg.dt_target);
    cfg.dt_initial = r.quantity("dt_initial", Dimension::time, cfg.dt_initial);
    cfg.ramp_factor = r.quantity("ramp_factor", Dimension::dimensionless, cfg.ramp_factor);
    cfg.cut_factor = r.quantity("cut_factor", Dimension::dimensionless, cfg.cut_factor);
    if (!(s.total_time > 0.0))
        throw ConfigError(r.path("total_time"), "must be positive");

    for (const auto* e : r.all("rate_change")) {
        const auto words = split_ws(e->value);
        if (words.size() != 3)
            throw ConfigError(r.path("rate_change"), "expected '<time> <unit> <factor>'");
        const double t = r.as_quantity("rate_change", words[0] + " " + words[1], Dimension::time);
        const double f = r.as_quantity("rate_change", words[2], Dimension::dimensionless);
        if (t < 0.0 || t > s.total_time)
            throw ConfigError(r.path("rate_change"), "time outside [0, total_time]");
        if (!(f >= 0.0))
            throw ConfigError(r.path("rate_change"), "factor must be non-negative");
        s.rate_changes.push_back({t, f});
    }
    if (const Entry* snap = r.find("snapshots")) {
        s.snapshot_fractions.clear();
        for (const auto& w : split_ws(snap->value)) {
            const double f = r.as_quantity("snapshots", w, Dimension::dimensionless);
            if (!(f > 0.0 && f <= 1.0))
                throw ConfigError(r.path("snapshots"), "fractions must lie in (0, 1]");
            s.snapshot_fractions.push_back(f);
        }
    }
}

void read_solver(Reader& r, SolverConfig& cfg)
{
    cfg.max_newton = r.integer("max_newton", cfg.max_newton);
    cfg.max_cuts = r.integer("max_cuts", cfg.max_cuts);
    cfg.tolerance = r.quantity("tolerance", Dimension::dimensionless, cfg.tolerance);
    cfg.flow_tolerance = r.quantity("flow_tolerance", Dimension::dimensionless, cfg.flow_tolerance);
    cfg.max_saturation_change = r.quantity("max_ds", Dimension::dimensionless, cfg.max_saturation_change);
    if (const auto kind = r.text("kind", ""); !kind.empty())
        cfg.solver_kind = parse_solver_kind(kind);
    if (const auto lin = r.text("linear_solver", ""); !lin.empty()) {
        try {
            cfg.linear_solver = parse_linear_solver_kind(lin);
        } catch (const std::exception& e) {
            throw ConfigError(r.path("linear_solver"), e.what());
        }
    }
    if (const auto up = r.text("flow_upwind", ""); !up.empty()) {
        if (up == "previous")
            cfg.flow_upwind = FlowUpwind::previous_potential;
        else if (up == "arithmetic")
            cfg.flow_upwind = FlowUpwind::arithmetic;
        else
            throw ConfigError(r.path("flow_upwind"), "expected previous or arithmetic");
    }

    auto& a = cfg.activation;
    a.gamma = r.quantity("gamma", Dimension::dimensionless, a.gamma);
    a.eps_flux = r.quantity("eps_flux", Dimension::rate, a.eps_flux);
    a.local_max_iters = r.integer("local_iterations", a.local_max_iters);
    a.activate_on_cut = r.boolean("activate_on_cut", a.activate_on_cut);
    a.drop_exchange = r.boolean("drop_exchange", a.drop_exchange);
    if (const auto red = r.text("reduction", ""); !red.empty()) {
        if (red == "mean")
            a.reduction = Reduction::mean;
        else if (red == "sum")
            a.reduction = Reduction::sum;
        else
            throw ConfigError(r.path("reduction"), "expected mean or sum");
    }
}

int wrap_index(int v, int n)
{
    return v < 0 ? n + v : v;
}

} // namespace

CaseConfig parse_case(std::istream& in, const std::string& source,
                      const std::filesystem::path& base_dir)
{
    auto sections = tokenize(in, source);
    CaseConfig c;
    c.name = std::filesystem::path(source).stem().string();
    c.base_dir = base_dir;

    const auto find_section = [&](const std::string& kind) -> Section* {
        Section* hit = nullptr;
        for (auto& s : sections)
            if (s.kind == kind) {
                if (hit)
                    throw ConfigError(kind, "duplicate section");
                hit = &s;
            }
        return hit;
    };
    for (const auto& s : sections) {
        static const char* known[] = {"case", "grid", "rock", "fractures", "fluid",
                                      "well", "schedule", "solver", "initial"};
        if (std::find_if(std::begin(known), std::end(known),
                         [&](const char* k) { return s.kind == k; }) == std::end(known))
            throw ConfigError(s.kind, "unknown section (line " + std::to_string(s.line) + ")");
        if (s.kind != "well" && !s.label.empty())
            throw ConfigError(s.kind, "only well sections take a label");
    }

    if (Section* s = find_section("case")) {
        Reader r(*s);
        c.name = r.text("name", c.name);
        r.finish();
    }
    Section* grid = find_section("grid");
    if (!grid)
        throw ConfigError("grid", "missing required section");
    {
        Reader r(*grid);
        read_grid(r, c);
        r.finish();
    }
    if (Section* s = find_section("rock")) {
        Reader r(*s);
        read_rock(r, c);
        r.finish();
    }
    if (Section* s = find_section("fractures")) {
        Reader r(*s);
        read_fractures(r, c);
        r.finish();
    }
    if (Section* s = find_section("fluid")) {
        Reader r(*s);
        read_fluid(r, c.fluid);
        r.finish();
    }
    if (Section* s = find_section("schedule")) {
        Reader r(*s);
        read_schedule(r, c);
        r.finish();
    }
    if (Section* s = find_section("solver")) {
        Reader r(*s);
        read_solver(r, c.solver);
        r.finish();
    }
    if (Section* s = find_section("initial")) {
        Reader r(*s);
        c.initial_pressure = r.quantity("pressure", Dimension::pressure, c.initial_pressure);
        c.initial_saturation = r.quantity("sw", Dimension::dimensionless, c.initial_saturation);
        if (!(c.initial_saturation >= 0.0 && c.initial_saturation <= 1.0))
            throw ConfigError(r.path("sw"), "must lie in [0, 1]");
        r.finish();
    }
    for (auto& s : sections) {
        if (s.kind != "well")
            continue;
        if (s.label.empty())
            throw ConfigError("well", "well section needs a name (line " + std::to_string(s.line) + ")");
        for (const auto& w : c.wells)
            if (w.name == s.label)
                throw ConfigError("well." + s.label, "duplicate well name");
        s.kind = "well." + s.label;
        Reader r(s);
        c.wells.push_back(read_well(r, s.label));
        r.finish();
    }
    for (const auto& w : c.wells) {
        const int i = wrap_index(w.i, c.dims[0]);
        const int j = wrap_index(w.j, c.dims[1]);
        if (i < 0 || i >= c.dims[0] || j < 0 || j >= c.dims[1])
            throw ConfigError("well." + w.name + ".location", "outside the grid");
        const int kt = wrap_index(w.k_top, c.dims[2]);
        const int kb = wrap_index(w.k_bottom, c.dims[2]);
        if (kt < 0 || kb >= c.dims[2] || kt > kb)
            throw ConfigError("well." + w.name + ".layers", "invalid layer range");
    }
    try {
        c.solver.validate();
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError("solver", e.what());
    }
    return c;
}

CaseConfig load_case(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError(path.string(), "cannot open case file");
    return parse_case(in, path.string(), path.parent_path());
}

std::filesystem::path resolve_case_path(const std::string& name_or_path)
{
    const std::filesystem::path p(name_or_path);
    if (std::filesystem::exists(p))
        return p;
    const auto packaged = std::filesystem::path(FRACFLOW_DATA_DIR) / (name_or_path + ".case");
    if (std::filesystem::exists(packaged))
        return packaged;
    throw ConfigError(name_or_path, "no such case file or packaged case");
}

std::vector<double> lognormal_permeability(const Dims& dims, double geometric_mean,
                                           double log_sigma, double correlation_cells,
                                           std::uint64_t seed)
{
    const int nx = dims[0];
    const int ny = dims[1];
    const auto plane = static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny);
    std::vector<double> z(plane, 0.0);
    if (log_sigma > 0.0) {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> normal(0.0, 1.0);
        for (auto& v : z)
            v = normal(rng);

        // Three box passes approximate a Gaussian kernel.
        const int radius = std::max(0, static_cast<int>(std::lround(correlation_cells)));
        std::vector<double> tmp(plane);
        for (int pass = 0; pass < 3 && radius > 0; ++pass) {
            for (int j = 0; j < ny; ++j)
                for (int i = 0; i < nx; ++i) {
                    double s = 0.0;
                    int n = 0;
                    for (int d = std::max(0, i - radius); d <= std::min(nx - 1, i + radius); ++d, ++n)
                        s += z[static_cast<std::size_t>(d + nx * j)];
                    tmp[static_cast<std::size_t>(i + nx * j)] = s / n;
                }
            for (int j = 0; j < ny; ++j)
                for (int i = 0; i < nx; ++i) {
                    double s = 0.0;
                    int n = 0;
                    for (int d = std::max(0, j - radius); d <= std::min(ny - 1, j + radius); ++d, ++n)
                        s += tmp[static_cast<std::size_t>(i + nx * d)];
                    z[static_cast<std::size_t>(i + nx * j)] = s / n;
                }
        }
        double mean = 0.0;
        for (double v : z)
            mean += v;
        mean /= static_cast<double>(plane);
        double var = 0.0;
        for (double v : z)
            var += (v - mean) * (v - mean);
        const double sd = std::sqrt(var / static_cast<double>(plane));
        for (auto& v : z)
            v = sd > 0.0 ? (v - mean) / sd : 0.0;
    }

    std::vector<double> k(plane * static_cast<std::size_t>(dims[2]));
    for (std::size_t c = 0; c < k.size(); ++c)
        k[c] = geometric_mean * std::exp(log_sigma * z[c % plane]);
    return k;
}

SimulationCase build_case(const CaseConfig& config)
{
    StructuredGrid grid(config.dims, config.extent);
    const int n = grid.num_cells();

    std::vector<double> perm;
    if (!config.rock.perm_file.empty()) {
        std::ifstream in(config.rock.perm_file);
        if (!in)
            throw ConfigError("rock.perm_file", "cannot open " + config.rock.perm_file.string());
        double v = 0.0;
        while (in >> v)
            perm.push_back(v * units::milli_darcy);
        if (!in.eof())
            throw ConfigError("rock.perm_file", "malformed value in " + config.rock.perm_file.string());
        if (static_cast<int>(perm.size()) != n)
            throw ConfigError("rock.perm_file", "expected " + std::to_string(n) + " values, got " +
                                                    std::to_string(perm.size()));
    } else {
        perm = lognormal_permeability(config.dims, config.rock.permeability, config.rock.log_sigma,
                                      config.rock.correlation_cells, config.rock.seed);
    }
    RockModel rock = RockModel::uniform(grid, config.rock.permeability, config.rock.porosity);
    for (int c = 0; c < n; ++c)
        rock.permeability[c] = {perm[c], perm[c], perm[c]};

    FractureNetwork network;
    const auto& fr = config.fractures;
    if (fr.generator) {
        network = generate_fracture_network(*fr.generator);
        if (fr.target_cells > 0)
            fit_network_to_cell_count(network, grid, fr.target_cells);
    } else if (!fr.file.empty()) {
        network = load_fracture_network(fr.file.string(), config.extent, fr.porosity);
    }
    EDFMTopology topology = embed_fracture_network(grid, rock, network);
    for (const auto& w : topology.warnings)
        std::clog << "warning: " << w << '\n';

    double pore_volume = topology.fracture_pore_volume();
    for (int c = 0; c < n; ++c)
        pore_volume += grid.cell_volume(c) * rock.porosity[c];

    std::vector<WellSpec> wells;
    const auto& h = grid.cell_size();
    for (const auto& wc : config.wells) {
        WellSpec w;
        w.name = wc.name;
        w.kind = wc.kind;
        w.control = wc.control;
        if (wc.control == WellControl::bhp) {
            w.target = wc.bhp;
        } else if (wc.rate > 0.0) {
            w.target = wc.rate;
        } else {
            const double period = wc.rate_pv_period > 0.0 ? wc.rate_pv_period : config.schedule.total_time;
            w.target = wc.rate_pv * pore_volume / period;
        }
        const int i = wrap_index(wc.i, config.dims[0]);
        const int j = wrap_index(wc.j, config.dims[1]);
        for (int k = wrap_index(wc.k_top, config.dims[2]); k <= wrap_index(wc.k_bottom, config.dims[2]); ++k) {
            const int cell = grid.index(i, j, k);
            const auto& kc = rock.permeability[cell];
            w.cells.push_back(cell);
            w.well_index.push_back(peaceman_well_index(h[0], h[1], h[2], kc[0], kc[1], wc.radius));
        }
        wells.push_back(std::move(w));
    }

    SimulationCase out{config.name,
                       build_model(std::move(grid), std::move(rock), std::move(topology),
                                   config.fluid, std::move(wells)),
                       config.schedule,
                       {}};
    out.initial = initial_state(out.model, config.initial_pressure, config.initial_saturation);
    return out;
}

} // namespace fracflow
