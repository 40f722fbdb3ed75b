#include "echolab/experiment.hpp"

#include "echolab/analysis.hpp"
#include "echolab/dynamics.hpp"
#include "echolab/echoes.hpp"
#include "echolab/entanglement.hpp"
#include "echolab/parallel.hpp"
#include "echolab/phasespace.hpp"
#include "echolab/qstate.hpp"
#include "echolab/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <memory>
#include <sstream>

namespace echolab
{

namespace
{

enum class KeyType
{
    Int,
    Real,
    Choice,
};

struct KeySpec
{
    const char* name;
    KeyType type;
    const char* fallback;
    double lo;
    double hi;
    const char* choices; // '|'-separated for Choice keys
    const char* help;
};

constexpr double kBig = 1e300;

// Schemas. Keys absent here are rejected.
const std::vector<KeySpec>& schema(ExperimentKind k)
{
    static const std::vector<KeySpec> echo = {
        {"model", KeyType::Choice, "rotator", 0, 0, "rotator|top", "map family"},
        {"N", KeyType::Int, "1024", 4, 65536, nullptr, "rotator grid size (even)"},
        {"S", KeyType::Real, "50", 0.5, 2000, nullptr, "top spin (integer or half-integer)"},
        {"K", KeyType::Real, "9.95", 0, 1e4, nullptr, "kick strength"},
        {"dK", KeyType::Real, "0", -1e3, 1e3, nullptr, "rotator kick perturbation"},
        {"phi", KeyType::Real, "0", -kPi, kPi, nullptr, "top x-rotation perturbation"},
        {"n_max", KeyType::Int, "50", 0, 1e6, nullptr, "last kick"},
        {"n_samples", KeyType::Int, "1", 1, 1e6, nullptr, "initial states; 1 uses the fixed center"},
        {"x0", KeyType::Real, "2", -kBig, kBig, nullptr, "rotator packet position"},
        {"p0", KeyType::Real, "1", -kBig, kBig, nullptr, "rotator packet momentum"},
        {"width", KeyType::Real, "0", 0, kPi, nullptr, "rotator packet width; 0 = coherent"},
        {"theta0", KeyType::Real, "1", 0, kPi, nullptr, "top coherent-state polar angle"},
        {"phi0", KeyType::Real, "0.7", -kBig, kBig, nullptr, "top coherent-state azimuth"},
        {"chaotic_only", KeyType::Int, "0", 0, 1, nullptr, "screen sampled centers by a finite-time exponent"},
    };
    static const std::vector<KeySpec> prepared = [] {
        auto v = echo;
        v.push_back({"T", KeyType::Int, "0", 0, 1e6, nullptr, "preparation kicks"});
        return v;
    }();
    static const std::vector<KeySpec> displacement = {
        {"N", KeyType::Int, "4096", 4, 65536, nullptr, "grid size (even)"},
        {"K", KeyType::Real, "10.09", 0, 1e4, nullptr, "kick strength"},
        {"kind", KeyType::Choice, "momentum", 0, 0, "momentum|spatial", "displacement direction"},
        {"m", KeyType::Real, "1", -65536, 65536, nullptr, "displacement in lattice units of 2 pi / N"},
        {"n_max", KeyType::Int, "50", 0, 1e6, nullptr, "last kick"},
        {"n_samples", KeyType::Int, "1", 1, 1e6, nullptr, "initial states; 1 uses the fixed center"},
        {"x0", KeyType::Real, "2", -kBig, kBig, nullptr, "packet position"},
        {"p0", KeyType::Real, "1", -kBig, kBig, nullptr, "packet momentum"},
        {"width", KeyType::Real, "0", 0, kPi, nullptr, "packet width; 0 = coherent"},
    };
    static const std::vector<KeySpec> boltzmann = {
        {"N1", KeyType::Int, "256", 4, 512, nullptr, "controlled rotator grid (even)"},
        {"N2", KeyType::Int, "256", 4, 512, nullptr, "environment rotator grid (even)"},
        {"K1", KeyType::Real, "10", 0, 1e4, nullptr, "controlled kick"},
        {"K2", KeyType::Real, "10", 0, 1e4, nullptr, "environment kick"},
        {"dK1", KeyType::Real, "0", -1e3, 1e3, nullptr, "reversal error on the controlled kick"},
        {"dK2", KeyType::Real, "0", -1e3, 1e3, nullptr, "environment kick change on the way back"},
        {"eps", KeyType::Real, "0", -10, 10, nullptr, "coupling"},
        {"n_max", KeyType::Int, "20", 0, 10000, nullptr, "last kick"},
        {"n_env", KeyType::Int, "20", 1, 100000, nullptr, "environment states"},
        {"x0", KeyType::Real, "2", -kBig, kBig, nullptr, "controlled packet position"},
        {"p0", KeyType::Real, "1", -kBig, kBig, nullptr, "controlled packet momentum"},
        {"width", KeyType::Real, "0", 0, kPi, nullptr, "packet width; 0 = coherent"},
    };
    static const std::vector<KeySpec> purity = {
        {"N1", KeyType::Int, "64", 4, 512, nullptr, "first rotator grid (even)"},
        {"N2", KeyType::Int, "128", 4, 512, nullptr, "second rotator grid (even)"},
        {"K1", KeyType::Real, "50.09", 0, 1e4, nullptr, "first kick"},
        {"K2", KeyType::Real, "50.09", 0, 1e4, nullptr, "second kick"},
        {"eps", KeyType::Real, "0.001", -10, 10, nullptr, "coupling"},
        {"n_max", KeyType::Int, "30", 0, 1e5, nullptr, "last kick"},
        {"n_samples", KeyType::Int, "1", 1, 1e6, nullptr, "product states; 1 uses the fixed centers"},
        {"x0", KeyType::Real, "2", -kBig, kBig, nullptr, "packet position (both factors)"},
        {"p0", KeyType::Real, "1", -kBig, kBig, nullptr, "packet momentum (both factors)"},
        {"width", KeyType::Real, "0", 0, kPi, nullptr, "packet width; 0 = coherent"},
    };
    static const std::vector<KeySpec> ldos_keys = {
        {"model", KeyType::Choice, "rotator", 0, 0, "rotator|top", "map family"},
        {"N", KeyType::Int, "256", 4, 1024, nullptr, "rotator grid size (even)"},
        {"S", KeyType::Real, "50", 0.5, 500, nullptr, "top spin"},
        {"K", KeyType::Real, "9.95", 0, 1e4, nullptr, "kick strength"},
        {"dK", KeyType::Real, "0", -1e3, 1e3, nullptr, "rotator kick perturbation"},
        {"phi", KeyType::Real, "0", -kPi, kPi, nullptr, "top x-rotation perturbation"},
        {"bins", KeyType::Int, "101", 8, 100001, nullptr, "histogram bins over (-pi, pi]"},
    };
    static const std::vector<KeySpec> lyap = {
        {"map", KeyType::Choice, "standard", 0, 0, "standard|top", "classical map"},
        {"K", KeyType::Real, "10", 0, 1e4, nullptr, "kick strength"},
        {"n_init", KeyType::Int, "10000", 1, 1e7, nullptr, "initial conditions"},
        {"n_steps", KeyType::Int, "1000", 1, 1e7, nullptr, "renormalization steps per orbit"},
        {"transient", KeyType::Int, "100", 0, 1e6, nullptr, "discarded steps"},
    };
    static const std::vector<KeySpec> wig = {
        {"N", KeyType::Int, "64", 4, 4096, nullptr, "grid size (even)"},
        {"state", KeyType::Choice, "coherent", 0, 0, "coherent|compass", "initial state"},
        {"x0", KeyType::Real, "3.14159265358979", -kBig, kBig, nullptr, "packet position"},
        {"p0", KeyType::Real, "3.14159265358979", -kBig, kBig, nullptr, "packet momentum"},
        {"width", KeyType::Real, "0", 0, kPi, nullptr, "packet width; 0 = coherent"},
        {"r0", KeyType::Real, "1", 0, kPi, nullptr, "compass arm"},
        {"K", KeyType::Real, "0", 0, 1e4, nullptr, "rotator kick used before export"},
        {"n", KeyType::Int, "0", 0, 1e5, nullptr, "kicks before export"},
    };
    static const std::vector<KeySpec> clf = {
        {"map", KeyType::Choice, "top", 0, 0, "standard|top", "classical map"},
        {"K", KeyType::Real, "1.1", 0, 1e4, nullptr, "kick strength"},
        {"dK", KeyType::Real, "0", -1e3, 1e3, nullptr, "standard-map kick perturbation"},
        {"phi", KeyType::Real, "0", -kPi, kPi, nullptr, "top x-rotation perturbation"},
        {"n_points", KeyType::Int, "100000", 1, 1e8, nullptr, "cloud size"},
        {"sigma", KeyType::Real, "0.05", 0, kPi, nullptr, "cloud width"},
        {"x0", KeyType::Real, "2", -kBig, kBig, nullptr, "torus cloud position"},
        {"p0", KeyType::Real, "1", -kBig, kBig, nullptr, "torus cloud momentum"},
        {"theta0", KeyType::Real, "1", 0, kPi, nullptr, "sphere cloud polar angle"},
        {"phi0", KeyType::Real, "0.7", -kBig, kBig, nullptr, "sphere cloud azimuth"},
        {"cell", KeyType::Real, "0", 0, kPi, nullptr, "histogram cell; 0 = size-based default"},
        {"n_max", KeyType::Int, "50", 0, 1e6, nullptr, "last kick"},
    };
    static const std::vector<KeySpec> toy = {
        {"d", KeyType::Int, "64", 1, 512, nullptr, "environment dimension"},
        {"p_up", KeyType::Real, "0.5", 0, 1, nullptr, "|alpha|^2"},
        {"g", KeyType::Real, "0.1", 0, 1e3, nullptr, "spin-conditioned coupling strength"},
        {"t_max", KeyType::Real, "20", 0, 1e6, nullptr, "last time"},
        {"n_t", KeyType::Int, "101", 1, 1e6, nullptr, "time samples"},
    };
    switch (k)
    {
    case ExperimentKind::Loschmidt: return echo;
    case ExperimentKind::Prepared: return prepared;
    case ExperimentKind::Displacement: return displacement;
    case ExperimentKind::Boltzmann: return boltzmann;
    case ExperimentKind::Purity: return purity;
    case ExperimentKind::Ldos: return ldos_keys;
    case ExperimentKind::Lyapunov: return lyap;
    case ExperimentKind::Wigner: return wig;
    case ExperimentKind::ClassicalFidelity: return clf;
    case ExperimentKind::SpinToy: return toy;
    }
    fail(ErrorCode::Internal, "unhandled experiment");
}

const char* const kGeneralKeys[] = {"experiment", "seed", "out", "format"};

bool is_general(std::string_view key)
{
    return std::find(std::begin(kGeneralKeys), std::end(kGeneralKeys), key) != std::end(kGeneralKeys);
}

std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

bool parse_real(std::string_view s, double& out)
{
    if (s.empty())
        return false;
    if (s.front() == '+')
        s.remove_prefix(1);
    const auto r = std::from_chars(s.data(), s.data() + s.size(), out);
    return r.ec == std::errc() && r.ptr == s.data() + s.size();
}

bool parse_int(std::string_view s, long& out)
{
    if (s.empty())
        return false;
    if (s.front() == '+')
        s.remove_prefix(1);
    const auto r = std::from_chars(s.data(), s.data() + s.size(), out);
    if (r.ec == std::errc() && r.ptr == s.data() + s.size())
        return true;
    // accept integral reals such as 1e4
    double d = 0;
    if (parse_real(s, d) && std::isfinite(d) && d == std::floor(d) && std::abs(d) < 9e18)
    {
        out = static_cast<long>(d);
        return true;
    }
    return false;
}

std::string canonical(const KeySpec& spec, const std::string& raw)
{
    const std::string key = spec.name;
    switch (spec.type)
    {
    case KeyType::Int:
    {
        long v = 0;
        if (!parse_int(raw, v))
            fail(ErrorCode::Parse, "key '" + key + "': expected an integer, got '" + raw + "'");
        if (v < spec.lo || v > spec.hi)
            fail(ErrorCode::Range, "key '" + key + "' = " + raw + " outside [" + format_double(spec.lo) + ", " +
                                       format_double(spec.hi) + "]");
        return std::to_string(v);
    }
    case KeyType::Real:
    {
        double v = 0;
        if (!parse_real(raw, v))
            fail(ErrorCode::Parse, "key '" + key + "': expected a number, got '" + raw + "'");
        if (!std::isfinite(v) || v < spec.lo || v > spec.hi)
            fail(ErrorCode::Range, "key '" + key + "' = " + raw + " outside the allowed range");
        return format_double(v);
    }
    case KeyType::Choice:
    {
        std::string_view all = spec.choices;
        while (!all.empty())
        {
            const auto bar = all.find('|');
            if (all.substr(0, bar) == raw)
                return raw;
            all = bar == std::string_view::npos ? std::string_view{} : all.substr(bar + 1);
        }
        fail(ErrorCode::Range, "key '" + key + "' must be one of " + spec.choices + ", got '" + raw + "'");
    }
    }
    fail(ErrorCode::Internal, "unhandled key type");
}

const std::string* lookup(const KeyValues& kv, std::string_view key)
{
    for (const auto& [k, v] : kv)
        if (k == key)
            return &v;
    return nullptr;
}

void require_even(long n, const char* key)
{
    if (n % 2 != 0)
        fail(ErrorCode::Range, std::string("key '") + key + "' must be even");
}

// Cross-key guards that a per-key range cannot express.
void check_model(const ExperimentConfig& c)
{
    switch (c.kind())
    {
    case ExperimentKind::Loschmidt:
    case ExperimentKind::Prepared:
    case ExperimentKind::Ldos:
        if (c.text("model") == "rotator")
            require_even(c.integer("N"), "N");
        else if (2.0 * c.real("S") != std::floor(2.0 * c.real("S")))
            fail(ErrorCode::Range, "key 'S' must be an integer or half-integer");
        break;
    case ExperimentKind::Displacement:
        require_even(c.integer("N"), "N");
        if (c.text("kind") == "spatial" && c.real("m") != std::floor(c.real("m")))
            fail(ErrorCode::Range, "spatial displacement 'm' must be an integer");
        break;
    case ExperimentKind::Boltzmann:
    case ExperimentKind::Purity:
        require_even(c.integer("N1"), "N1");
        require_even(c.integer("N2"), "N2");
        break;
    case ExperimentKind::Wigner: require_even(c.integer("N"), "N"); break;
    default: break;
    }
}

} // namespace

// ---------------------------------------------------------------- config

const char* experiment_name(ExperimentKind k)
{
    switch (k)
    {
    case ExperimentKind::Loschmidt: return "loschmidt";
    case ExperimentKind::Prepared: return "prepared";
    case ExperimentKind::Displacement: return "displacement";
    case ExperimentKind::Boltzmann: return "boltzmann";
    case ExperimentKind::Purity: return "purity";
    case ExperimentKind::Ldos: return "ldos";
    case ExperimentKind::Lyapunov: return "lyapunov";
    case ExperimentKind::Wigner: return "wigner";
    case ExperimentKind::ClassicalFidelity: return "classical_fidelity";
    case ExperimentKind::SpinToy: return "spin_toy";
    }
    return "?";
}

const std::vector<ExperimentKind>& all_experiments()
{
    static const std::vector<ExperimentKind> all = {
        ExperimentKind::Loschmidt, ExperimentKind::Prepared, ExperimentKind::Displacement,
        ExperimentKind::Boltzmann, ExperimentKind::Purity,   ExperimentKind::Ldos,
        ExperimentKind::Lyapunov,  ExperimentKind::Wigner,   ExperimentKind::ClassicalFidelity,
        ExperimentKind::SpinToy,
    };
    return all;
}

ExperimentKind experiment_from_name(std::string_view name)
{
    for (auto k : all_experiments())
        if (name == experiment_name(k))
            return k;
    fail(ErrorCode::Parse, "unknown experiment '" + std::string(name) + "'");
}

std::vector<ConfigKey> config_keys(ExperimentKind k)
{
    std::vector<ConfigKey> out;
    for (const auto& s : schema(k))
        out.push_back({s.name, s.fallback, s.help});
    return out;
}

double ExperimentConfig::real(std::string_view key) const
{
    const std::string* v = lookup(params_, key);
    require(v != nullptr, ErrorCode::UnknownKey, "configuration key not in schema");
    double d = 0;
    parse_real(*v, d);
    return d;
}

long ExperimentConfig::integer(std::string_view key) const
{
    const std::string* v = lookup(params_, key);
    require(v != nullptr, ErrorCode::UnknownKey, "configuration key not in schema");
    long n = 0;
    parse_int(*v, n);
    return n;
}

const std::string& ExperimentConfig::text(std::string_view key) const
{
    const std::string* v = lookup(params_, key);
    require(v != nullptr, ErrorCode::UnknownKey, "configuration key not in schema");
    return *v;
}

KeyValues ExperimentConfig::echo() const
{
    KeyValues kv;
    kv.emplace_back("experiment", experiment_name(kind_));
    kv.emplace_back("seed", std::to_string(seed_));
    for (const auto& p : params_)
        kv.push_back(p);
    kv.emplace_back("format", format_);
    if (!output_.empty())
        kv.emplace_back("out", output_);
    return kv;
}

ExperimentConfig parse_config(std::string_view text, const KeyValues& overrides)
{
    KeyValues entries;
    std::size_t line_no = 0;
    while (!text.empty())
    {
        const auto nl = text.find('\n');
        const std::string line = trim(text.substr(0, nl));
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (line.empty() || line[0] == '#' || line[0] == ';')
            continue;
        if (line.front() == '[')
        {
            const bool ok = line.back() == ']' && line.size() > 2 &&
                            std::all_of(line.begin() + 1, line.end() - 1,
                                        [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
            if (!ok)
                fail(ErrorCode::Parse, "line " + std::to_string(line_no) + ": malformed section header");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            fail(ErrorCode::Parse, "line " + std::to_string(line_no) + ": expected 'key = value'");
        std::string key = trim(std::string_view(line).substr(0, eq));
        std::string value = trim(std::string_view(line).substr(eq + 1));
        if (key.empty() || value.empty())
            fail(ErrorCode::Parse, "line " + std::to_string(line_no) + ": empty key or value");
        if (lookup(entries, key))
            fail(ErrorCode::Parse, "line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
        entries.emplace_back(std::move(key), std::move(value));
    }
    for (const auto& [k, v] : overrides)
    {
        if (k.empty() || trim(v).empty())
            fail(ErrorCode::Parse, "override with empty key or value");
        bool replaced = false;
        for (auto& e : entries)
            if (e.first == k)
            {
                e.second = trim(v);
                replaced = true;
            }
        if (!replaced)
            entries.emplace_back(k, trim(v));
    }

    const std::string* exp = lookup(entries, "experiment");
    if (!exp)
        fail(ErrorCode::Parse, "missing required key 'experiment'");
    ExperimentConfig cfg;
    cfg.kind_ = experiment_from_name(*exp);
    const auto& keys = schema(cfg.kind_);

    for (const auto& [k, v] : entries)
        if (!is_general(k) && std::none_of(keys.begin(), keys.end(), [&](const KeySpec& s) { return k == s.name; }))
            fail(ErrorCode::UnknownKey, "unknown key '" + k + "' for experiment " + experiment_name(cfg.kind_));

    const std::string* seed = lookup(entries, "seed");
    if (!seed)
        fail(ErrorCode::Parse, "missing required key 'seed'");
    {
        const auto r = std::from_chars(seed->data(), seed->data() + seed->size(), cfg.seed_);
        if (!seed->empty() && seed->front() == '-')
            fail(ErrorCode::Range, "seed must be non-negative");
        if (r.ec == std::errc::result_out_of_range)
            fail(ErrorCode::Range, "seed must fit in 64 bits");
        if (r.ec != std::errc() || r.ptr != seed->data() + seed->size())
            fail(ErrorCode::Parse, "seed must be an unsigned integer");
    }
    if (const std::string* f = lookup(entries, "format"))
    {
        if (*f != "csv" && *f != "json")
            fail(ErrorCode::Range, "format must be csv or json");
        cfg.format_ = *f;
    }
    if (const std::string* o = lookup(entries, "out"))
        cfg.output_ = *o;

    for (const auto& s : keys)
    {
        const std::string* v = lookup(entries, s.name);
        cfg.params_.emplace_back(s.name, canonical(s, v ? *v : std::string(s.fallback)));
    }
    check_model(cfg);
    return cfg;
}

ExperimentConfig load_config(const std::string& path, const KeyValues& overrides)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        fail(ErrorCode::Io, "cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), overrides);
}

// ---------------------------------------------------------------- run

namespace
{

using Clock = std::chrono::steady_clock;

int spin_twice(const ExperimentConfig& c)
{
    return static_cast<int>(std::lround(2.0 * c.real("S")));
}

std::unique_ptr<Floquet> make_map(const ExperimentConfig& c, bool perturbed)
{
    if (c.text("model") == "rotator")
        return std::make_unique<RotatorFloquet>(static_cast<std::size_t>(c.integer("N")),
                                                c.real("K") + (perturbed ? c.real("dK") : 0.0));
    return std::make_unique<TopFloquet>(spin_twice(c), c.real("K"), perturbed ? c.real("phi") : 0.0);
}

StateVector fixed_state(const ExperimentConfig& c)
{
    if (c.text("model") == "rotator")
        return gaussian_torus(TorusGrid(static_cast<std::size_t>(c.integer("N"))),
                              {c.real("x0"), c.real("p0"), c.real("width")});
    return spin_coherent(spin_twice(c), c.real("theta0"), c.real("phi0"));
}

StateSampler echo_sampler(const ExperimentConfig& c)
{
    const bool screen = c.integer("chaotic_only") != 0;
    const double K = c.real("K");
    if (c.text("model") == "rotator")
    {
        std::function<bool(TorusPoint)> accept;
        if (screen)
            accept = [K](TorusPoint p) { return finite_time_lyapunov(K, p, 200) > 0.05; };
        return torus_packet_sampler(TorusGrid(static_cast<std::size_t>(c.integer("N"))), c.real("width"), accept);
    }
    std::function<bool(SpherePoint)> accept;
    if (screen)
        accept = [K](SpherePoint p) { return finite_time_lyapunov(K, p, 200) > 0.05; };
    return spin_coherent_sampler(spin_twice(c), accept);
}

void add_series(ResultTable& t, const std::vector<long>& times, const std::vector<double>& mean,
                const std::vector<double>* var)
{
    for (std::size_t i = 0; i < times.size(); ++i)
        t.rows.push_back({static_cast<double>(times[i]), mean[i], var ? (*var)[i] : 0.0});
}

void run_echo(const ExperimentConfig& c, const RunOptions& o, ResultTable& t)
{
    t.columns = {"t", "value", "variance"};
    const auto F0 = make_map(c, false);
    const auto F = make_map(c, true);
    const long n_max = c.integer("n_max");
    const long T = c.kind() == ExperimentKind::Prepared ? c.integer("T") : 0;
    const int n = static_cast<int>(c.integer("n_samples"));
    if (n == 1)
    {
        const EchoSeries s = prepared_echo(fixed_state(c), *F0, *F, T, n_max);
        add_series(t, s.times, s.values, nullptr);
        return;
    }
    const Floquet& f0 = *F0;
    const Floquet& f = *F;
    const EchoEnsembleStats st = ensemble_of(
        echo_sampler(c), [&](const StateVector& psi) { return prepared_echo(psi, f0, f, T, n_max); }, n, c.seed(),
        o.jobs);
    add_series(t, st.times, st.mean, &st.variance);
}

void run_displacement(const ExperimentConfig& c, const RunOptions& o, ResultTable& t)
{
    t.columns = {"t", "value", "variance"};
    const auto N = static_cast<std::size_t>(c.integer("N"));
    const RotatorFloquet F0(N, c.real("K"));
    DisplacementSpec d;
    d.kind = c.text("kind") == "spatial" ? DisplacementSpec::Kind::Spatial : DisplacementSpec::Kind::Momentum;
    d.m = c.real("m");
    const long n_max = c.integer("n_max");
    const int n = static_cast<int>(c.integer("n_samples"));
    const TorusGrid grid(N);
    if (n == 1)
    {
        const EchoSeries s = displacement_echo(gaussian_torus(grid, {c.real("x0"), c.real("p0"), c.real("width")}),
                                               F0, d, n_max);
        add_series(t, s.times, s.values, nullptr);
        return;
    }
    const EchoEnsembleStats st = ensemble_of(
        torus_packet_sampler(grid, c.real("width")),
        [&](const StateVector& psi) { return displacement_echo(psi, F0, d, n_max); }, n, c.seed(), o.jobs);
    add_series(t, st.times, st.mean, &st.variance);
}

void run_boltzmann(const ExperimentConfig& c, const RunOptions& o, ResultTable& t)
{
    t.columns = {"t", "value"};
    const auto N1 = static_cast<std::size_t>(c.integer("N1"));
    const auto N2 = static_cast<std::size_t>(c.integer("N2"));
    const auto Hf = CoupledFloquet::forward(N1, N2, c.real("K1"), c.real("K2"), c.real("eps"));
    const auto Hb =
        CoupledFloquet::backward(N1, N2, c.real("K1") + c.real("dK1"), c.real("K2") + c.real("dK2"), c.real("eps"));
    const StateVector psi1 = gaussian_torus(TorusGrid(N1), {c.real("x0"), c.real("p0"), c.real("width")});
    const EchoSeries s = boltzmann_echo(psi1, random_state_sampler(Basis::torus(N2)), Hf, Hb, c.integer("n_max"),
                                        static_cast<int>(c.integer("n_env")), c.seed(), o.jobs);
    for (std::size_t i = 0; i < s.size(); ++i)
        t.rows.push_back({static_cast<double>(s.times[i]), s.values[i]});
    const double g = predicted_gamma(RotatorPerturbation{c.real("dK1"), N1}) +
                     2.0 * predicted_gamma(CoupledInteraction{c.real("eps"), N1, N2});
    t.provenance.emplace_back("predicted_rate", format_double(g));
}

void run_purity(const ExperimentConfig& c, const RunOptions& o, ResultTable& t)
{
    t.columns = {"t", "value", "variance"};
    const auto N1 = static_cast<std::size_t>(c.integer("N1"));
    const auto N2 = static_cast<std::size_t>(c.integer("N2"));
    const auto F = CoupledFloquet::forward(N1, N2, c.real("K1"), c.real("K2"), c.real("eps"));
    const TorusGrid g1(N1), g2(N2);
    const int n = static_cast<int>(c.integer("n_samples"));
    if (n == 1)
    {
        const WavepacketSpec ps{c.real("x0"), c.real("p0"), c.real("width")};
        const PuritySeries s = purity_series(gaussian_torus(g1, ps), gaussian_torus(g2, ps), F, c.integer("n_max"));
        add_series(t, s.times, s.values, nullptr);
    }
    else
    {
        const EchoEnsembleStats st = purity_ensemble(torus_packet_sampler(g1, c.real("width")),
                                                     torus_packet_sampler(g2, c.real("width")), F,
                                                     c.integer("n_max"), n, c.seed(), o.jobs);
        add_series(t, st.times, st.mean, &st.variance);
    }
    t.provenance.emplace_back("saturation", format_double(1.0 / N1 + 1.0 / N2));
    t.provenance.emplace_back("predicted_rate",
                              format_double(2.0 * predicted_gamma(CoupledInteraction{c.real("eps"), N1, N2})));
}

void run_ldos(const ExperimentConfig& c, ResultTable& t)
{
    t.columns = {"theta", "weight"};
    const auto F0 = make_map(c, false);
    const auto F = make_map(c, true);
    const LdosHistogram h = ldos(*F0, *F, static_cast<int>(c.integer("bins")));
    for (std::size_t i = 0; i < h.centers.size(); ++i)
        t.rows.push_back({h.centers[i], h.weights[i]});
    const LorentzianFit fit = lorentzian_fit(h);
    const double pred = c.text("model") == "rotator"
                            ? predicted_gamma(RotatorPerturbation{c.real("dK"), static_cast<std::size_t>(c.integer("N"))})
                            : predicted_gamma(TopPerturbation{c.real("phi"), spin_twice(c)});
    t.provenance.emplace_back("gamma_fit", format_double(fit.gamma));
    t.provenance.emplace_back("fit_residual", format_double(fit.residual));
    t.provenance.emplace_back("at_floor", fit.at_floor ? "1" : "0");
    t.provenance.emplace_back("gamma_predicted", format_double(pred));
    t.provenance.emplace_back("level_spacing", format_double(h.level_spacing));
}

void run_lyapunov(const ExperimentConfig& c, const RunOptions& o, ResultTable& t)
{
    t.columns = {"lambda", "stderr", "n_init", "n_steps"};
    BenettinOptions opts;
    opts.transient = static_cast<int>(c.integer("transient"));
    opts.jobs = o.jobs;
    const ClassicalMap map = c.text("map") == "standard" ? ClassicalMap::Standard : ClassicalMap::Top;
    const LyapunovEstimate e = benettin_lyapunov(map, c.real("K"), static_cast<int>(c.integer("n_init")),
                                                 static_cast<int>(c.integer("n_steps")), c.seed(), opts);
    t.rows.push_back({e.lambda, e.stderr_, static_cast<double>(e.n_init), static_cast<double>(e.n_steps)});
    if (map == ClassicalMap::Standard && c.real("K") > 2.0)
        t.provenance.emplace_back("reference_ln_K_over_2", format_double(std::log(c.real("K") / 2.0)));
    t.provenance.emplace_back("redraws", std::to_string(e.redraws));
}

void run_wigner(const ExperimentConfig& c, ResultTable& t)
{
    t.columns = {"q", "p", "value"};
    const auto N = static_cast<std::size_t>(c.integer("N"));
    const TorusGrid grid(N);
    const WavepacketSpec ps{c.real("x0"), c.real("p0"), c.real("width")};
    StateVector psi = c.text("state") == "compass" ? compass_pure(grid, ps, c.real("r0")) : gaussian_torus(grid, ps);
    if (c.integer("n") > 0)
        psi = apply(RotatorFloquet(N, c.real("K")), psi, c.integer("n"));
    const WignerGrid w = wigner(psi);
    const std::size_t side = w.side();
    t.rows.reserve(side * side);
    for (std::size_t a = 0; a < side; ++a)
        for (std::size_t b = 0; b < side; ++b)
            t.rows.push_back({static_cast<double>(a) * w.step(), static_cast<double>(b) * w.step(), w.at(a, b)});
    t.provenance.emplace_back("normalization", format_double(w.total()));
}

void run_classical_fidelity(const ExperimentConfig& c, ResultTable& t)
{
    t.columns = {"t", "value"};
    const auto n = static_cast<std::size_t>(c.integer("n_points"));
    const bool torus = c.text("map") == "standard";
    const ClassicalMap map = torus ? ClassicalMap::Standard : ClassicalMap::Top;
    PointCloud a = torus ? torus_gaussian_cloud({c.real("x0"), c.real("p0")}, c.real("sigma"), n, c.seed())
                         : sphere_gaussian_cloud(sphere_from_angles(c.real("theta0"), c.real("phi0")), c.real("sigma"),
                                                 n, c.seed());
    PointCloud b = a;
    const double cell = c.real("cell") > 0 ? c.real("cell") : default_fidelity_cell(n);
    const double K = c.real("K");
    for (long s = 0; s <= c.integer("n_max"); ++s)
    {
        if (s > 0)
        {
            a = liouville_propagate(a, map, K, 1, 0.0);
            b = torus ? liouville_propagate(b, map, K + c.real("dK"), 1) : liouville_propagate(b, map, K, 1, c.real("phi"));
        }
        t.rows.push_back({static_cast<double>(s), classical_fidelity(a, b, cell)});
    }
    t.provenance.emplace_back("cell", format_double(cell));
}

void run_spin_toy(const ExperimentConfig& c, ResultTable& t)
{
    t.columns = {"t", "fidelity_re", "fidelity_im", "purity"};
    const auto d = static_cast<Eigen::Index>(c.integer("d"));
    Rng rng(c.seed());
    auto gue = [&](double scale) {
        CMat m(d, d);
        for (Eigen::Index i = 0; i < d; ++i)
            for (Eigen::Index j = 0; j < d; ++j)
                m(i, j) = Cx(rng.normal(), rng.normal());
        return CMat(scale * 0.5 * (m + m.adjoint()) / std::sqrt(static_cast<double>(d)));
    };
    const CMat h_env = gue(1.0);
    const CMat h_up = gue(c.real("g"));
    const CMat h_down = gue(c.real("g"));
    const StateVector phi0 = random_state(Basis::generic(static_cast<std::size_t>(d)), rng.next_u64());
    const double pu = c.real("p_up");
    const long nt = c.integer("n_t");
    std::vector<double> times(static_cast<std::size_t>(nt));
    for (long i = 0; i < nt; ++i)
        times[static_cast<std::size_t>(i)] = nt > 1 ? c.real("t_max") * static_cast<double>(i) / (nt - 1) : 0.0;
    const SpinToyResult r = spin_dephasing_toy(Cx(std::sqrt(pu), 0.0), Cx(std::sqrt(1.0 - pu), 0.0), h_env, h_up,
                                               h_down, phi0.vec(), times);
    for (std::size_t i = 0; i < times.size(); ++i)
        t.rows.push_back({times[i], r.fidelity[i].real(), r.fidelity[i].imag(), r.purity[i]});
}

} // namespace

ResultTable run(const ExperimentConfig& cfg, const RunOptions& opts)
{
    const auto start = Clock::now();
    ResultTable t;
    t.experiment = experiment_name(cfg.kind());
    t.provenance = cfg.echo();
    t.provenance.emplace_back("version", version());
    t.provenance.emplace_back("deterministic", opts.deterministic ? "1" : "0");
    switch (cfg.kind())
    {
    case ExperimentKind::Loschmidt:
    case ExperimentKind::Prepared: run_echo(cfg, opts, t); break;
    case ExperimentKind::Displacement: run_displacement(cfg, opts, t); break;
    case ExperimentKind::Boltzmann: run_boltzmann(cfg, opts, t); break;
    case ExperimentKind::Purity: run_purity(cfg, opts, t); break;
    case ExperimentKind::Ldos: run_ldos(cfg, t); break;
    case ExperimentKind::Lyapunov: run_lyapunov(cfg, opts, t); break;
    case ExperimentKind::Wigner: run_wigner(cfg, t); break;
    case ExperimentKind::ClassicalFidelity: run_classical_fidelity(cfg, t); break;
    case ExperimentKind::SpinToy: run_spin_toy(cfg, t); break;
    }
    const double wall = std::chrono::duration<double>(Clock::now() - start).count();
    t.provenance.emplace_back("wall_time_s", format_double(wall));
    return t;
}

// ---------------------------------------------------------------- output

std::string format_double(double v)
{
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

namespace
{
std::string one_line(std::string s)
{
    std::replace(s.begin(), s.end(), '\n', ' ');
    std::replace(s.begin(), s.end(), '\r', ' ');
    return s;
}
} // namespace

std::string emit_csv(const ResultTable& t)
{
    std::string out;
    for (const auto& [k, v] : t.provenance)
        out += "# " + one_line(k) + " = " + one_line(v) + "\n";
    for (std::size_t i = 0; i < t.columns.size(); ++i)
        out += (i ? "," : "") + t.columns[i];
    out += "\n";
    for (const auto& row : t.rows)
    {
        for (std::size_t i = 0; i < row.size(); ++i)
        {
            if (i)
                out += ',';
            out += format_double(row[i]);
        }
        out += '\n';
    }
    return out;
}

std::string emit_json(const ResultTable& t)
{
    nlohmann::ordered_json j;
    j["experiment"] = t.experiment;
    nlohmann::ordered_json prov = nlohmann::ordered_json::object();
    for (const auto& [k, v] : t.provenance)
        prov[k] = v;
    j["provenance"] = prov;
    j["columns"] = t.columns;
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& r : t.rows)
        rows.push_back(r);
    j["rows"] = rows;
    return j.dump() + "\n";
}

std::string emit(const ResultTable& t, std::string_view format)
{
    if (format == "csv")
        return emit_csv(t);
    if (format == "json")
        return emit_json(t);
    fail(ErrorCode::Range, "format must be csv or json");
}

ResultTable parse_csv(std::string_view text)
{
    ResultTable t;
    bool header = false;
    std::size_t line_no = 0;
    while (!text.empty())
    {
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (line.empty())
            continue;
        if (!header && line.front() == '#')
        {
            const auto eq = line.find(" = ");
            if (line.size() < 2 || line[1] != ' ' || eq == std::string_view::npos)
                fail(ErrorCode::Parse, "line " + std::to_string(line_no) + ": malformed provenance line");
            t.provenance.emplace_back(std::string(line.substr(2, eq - 2)), std::string(line.substr(eq + 3)));
            if (t.provenance.back().first == "experiment")
                t.experiment = t.provenance.back().second;
            continue;
        }
        std::vector<std::string_view> cells;
        std::size_t pos = 0;
        while (true)
        {
            const auto comma = line.find(',', pos);
            cells.push_back(line.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos));
            if (comma == std::string_view::npos)
                break;
            pos = comma + 1;
        }
        if (!header)
        {
            for (auto c : cells)
                t.columns.emplace_back(c);
            header = true;
            continue;
        }
        if (cells.size() != t.columns.size())
            fail(ErrorCode::Parse, "line " + std::to_string(line_no) + ": wrong number of cells");
        std::vector<double> row;
        for (auto c : cells)
        {
            double v = 0;
            const auto r = std::from_chars(c.data(), c.data() + c.size(), v);
            if (r.ec != std::errc() || r.ptr != c.data() + c.size())
                fail(ErrorCode::Parse, "line " + std::to_string(line_no) + ": bad number '" + std::string(c) + "'");
            row.push_back(v);
        }
        t.rows.push_back(std::move(row));
    }
    if (!header)
        fail(ErrorCode::Parse, "CSV has no header row");
    return t;
}

void write_file(const std::string& path, const std::string& bytes)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        fail(ErrorCode::Io, "cannot open '" + path + "' for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out)
        fail(ErrorCode::Io, "write to '" + path + "' failed");
}

// ---------------------------------------------------------------- recipes

const std::vector<Recipe>& repro_recipes()
{
    static const std::vector<Recipe> r = {
        {"oracle-rotator", "rotator echo at N=128 against which the dense check is run",
         "experiment = loschmidt\nseed = 1\nmodel = rotator\nN = 128\nK = 9.95\ndK = 0.004\nn_max = 20\n"},
        {"lyapunov-k10", "standard-map exponent at K=10 (expect ln 5)",
         "experiment = lyapunov\nseed = 1\nmap = standard\nK = 10\nn_init = 10000\nn_steps = 1000\n"},
        {"perturbative-top", "Gaussian echo decay of the kicked top, S=500, K=13.1",
         "experiment = loschmidt\nseed = 1\nmodel = top\nS = 500\nK = 13.1\nphi = 1e-6\nn_max = 60\n"
         "n_samples = 20\n"},
        {"golden-rule", "rotator golden-rule echo, N=4096, K=9.95",
         "experiment = loschmidt\nseed = 1\nmodel = rotator\nN = 4096\nK = 9.95\ndK = 8e-5\nn_max = 40\n"
         "n_samples = 20\n"},
        {"ldos-rotator", "LDoS of the rotator, N=1024",
         "experiment = ldos\nseed = 1\nmodel = rotator\nN = 1024\nK = 9.95\ndK = 3.2e-4\n"},
        {"prepared-top", "prepared-state echo of the kicked top, K=3.9, T=4",
         "experiment = prepared\nseed = 1\nmodel = top\nS = 500\nK = 3.9\nphi = 1.2e-3\nT = 4\nn_max = 30\n"
         "n_samples = 20\nchaotic_only = 1\n"},
        {"freeze", "momentum displacement echo plateau, N=4096, K=10.09",
         "experiment = displacement\nseed = 1\nN = 4096\nK = 10.09\nkind = momentum\nm = 1\nn_max = 60\n"},
        {"boltzmann", "Boltzmann echo of coupled rotators, N=256",
         "experiment = boltzmann\nseed = 1\nN1 = 256\nN2 = 256\nK1 = 10\nK2 = 10\ndK1 = 0.0072\neps = 0.002\n"
         "n_max = 15\nn_env = 10\n"},
        {"purity", "purity decay of coupled rotators, N1=64, N2=128, K=50.09",
         "experiment = purity\nseed = 1\nN1 = 64\nN2 = 128\nK1 = 50.09\nK2 = 50.09\neps = 0.0005\nn_max = 60\n"
         "n_samples = 10\n"},
        {"wigner", "Wigner function of a coherent state, N=64",
         "experiment = wigner\nseed = 1\nN = 64\nstate = coherent\n"},
        {"classical-regular", "classical fidelity of the regular kicked top, K=1.1",
         "experiment = classical_fidelity\nseed = 1\nmap = top\nK = 1.1\nphi = 1.7e-4\nn_points = 200000\n"
         "sigma = 0.0316\nn_max = 100\n"},
        {"spin-toy", "spin-1/2 dephasing toy with a d=64 environment",
         "experiment = spin_toy\nseed = 1\nd = 64\np_up = 0.5\ng = 0.2\nt_max = 20\nn_t = 41\n"},
    };
    return r;
}

const Recipe& find_recipe(std::string_view name)
{
    for (const auto& r : repro_recipes())
        if (r.name == name)
            return r;
    fail(ErrorCode::UnknownKey, "unknown recipe '" + std::string(name) + "'");
}

} // namespace echolab
