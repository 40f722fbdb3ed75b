#include "echolab/echolab.h"

#include "echolab/dynamics.hpp"
#include "echolab/echoes.hpp"
#include "echolab/experiment.hpp"
#include "echolab/qstate.hpp"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <limits>
#include <memory>
#include <new>
#include <string>

using namespace echolab;

struct echolab_config
{
    ExperimentConfig cfg;
    std::string experiment;
};

struct echolab_table
{
    ResultTable table;
};

struct echolab_state
{
    StateVector psi;
};

struct echolab_floquet
{
    std::unique_ptr<Floquet> engine;
};

namespace
{

thread_local std::string g_error;

int record(int status, const std::string& msg)
{
    g_error = msg;
    return status;
}

// Runs fn, mapping exceptions onto status codes.
template <class Fn>
int guarded(Fn&& fn)
{
    try
    {
        fn();
        g_error.clear();
        return ECHOLAB_OK;
    }
    catch (const Error& e)
    {
        return record(static_cast<int>(e.code()), e.what());
    }
    catch (const std::bad_alloc&)
    {
        return record(ECHOLAB_E_INTERNAL, "out of memory");
    }
    catch (const std::exception& e)
    {
        return record(ECHOLAB_E_INTERNAL, e.what());
    }
}

#define ECHOLAB_NONNULL(p)                                                                                             \
    do                                                                                                                 \
    {                                                                                                                  \
        if (!(p))                                                                                                      \
            return record(ECHOLAB_E_ARGUMENT, "null argument: " #p);                                                   \
    } while (0)

KeyValues split_overrides(const char* const* ov, size_t n)
{
    KeyValues kv;
    for (size_t i = 0; i < n; ++i)
    {
        require(ov[i] != nullptr, ErrorCode::Parse, "null override");
        const std::string s = ov[i];
        const auto eq = s.find('=');
        if (eq == std::string::npos)
            fail(ErrorCode::Parse, "override '" + s + "' is not key=value");
        kv.emplace_back(s.substr(0, eq), s.substr(eq + 1));
    }
    return kv;
}

} // namespace

extern "C" {

const char* echolab_version(void)
{
    return version();
}

const char* echolab_status_name(int status)
{
    if (status == ECHOLAB_E_ARGUMENT)
        return "E_ARGUMENT";
    if (status < 0 || status > ECHOLAB_E_INTERNAL)
        return "E_UNKNOWN_STATUS";
    return error_code_name(static_cast<ErrorCode>(status));
}

const char* echolab_last_error(void)
{
    return g_error.c_str();
}

void echolab_free(void* p)
{
    std::free(p);
}

int echolab_config_parse(const char* text, const char* const* overrides, size_t n_overrides, echolab_config** out)
{
    ECHOLAB_NONNULL(text);
    ECHOLAB_NONNULL(out);
    if (n_overrides)
        ECHOLAB_NONNULL(overrides);
    *out = nullptr;
    return guarded([&] {
        auto c = std::make_unique<echolab_config>();
        c->cfg = parse_config(text, split_overrides(overrides, n_overrides));
        c->experiment = experiment_name(c->cfg.kind());
        *out = c.release();
    });
}

int echolab_config_load(const char* path, const char* const* overrides, size_t n_overrides, echolab_config** out)
{
    ECHOLAB_NONNULL(path);
    ECHOLAB_NONNULL(out);
    if (n_overrides)
        ECHOLAB_NONNULL(overrides);
    *out = nullptr;
    return guarded([&] {
        auto c = std::make_unique<echolab_config>();
        c->cfg = load_config(path, split_overrides(overrides, n_overrides));
        c->experiment = experiment_name(c->cfg.kind());
        *out = c.release();
    });
}

const char* echolab_config_experiment(const echolab_config* cfg)
{
    return cfg ? cfg->experiment.c_str() : "";
}

const char* echolab_config_output(const echolab_config* cfg)
{
    return cfg ? cfg->cfg.output().c_str() : "";
}

const char* echolab_config_format(const echolab_config* cfg)
{
    return cfg ? cfg->cfg.format().c_str() : "";
}

void echolab_config_free(echolab_config* cfg)
{
    delete cfg;
}

size_t echolab_experiment_count(void)
{
    return all_experiments().size();
}

const char* echolab_experiment_name(size_t i)
{
    return i < all_experiments().size() ? experiment_name(all_experiments()[i]) : nullptr;
}

size_t echolab_recipe_count(void)
{
    return repro_recipes().size();
}

const char* echolab_recipe_name(size_t i)
{
    return i < repro_recipes().size() ? repro_recipes()[i].name.c_str() : nullptr;
}

const char* echolab_recipe_summary(size_t i)
{
    return i < repro_recipes().size() ? repro_recipes()[i].summary.c_str() : nullptr;
}

int echolab_recipe_config(const char* name, const char** text)
{
    ECHOLAB_NONNULL(name);
    ECHOLAB_NONNULL(text);
    return guarded([&] { *text = find_recipe(name).config.c_str(); });
}

int echolab_run(const echolab_config* cfg, int jobs, int deterministic, echolab_table** out)
{
    ECHOLAB_NONNULL(cfg);
    ECHOLAB_NONNULL(out);
    *out = nullptr;
    return guarded([&] {
        auto t = std::make_unique<echolab_table>();
        t->table = run(cfg->cfg, {jobs, deterministic != 0});
        *out = t.release();
    });
}

size_t echolab_table_rows(const echolab_table* t)
{
    return t ? t->table.rows.size() : 0;
}

size_t echolab_table_cols(const echolab_table* t)
{
    return t ? t->table.columns.size() : 0;
}

const char* echolab_table_column(const echolab_table* t, size_t col)
{
    return t && col < t->table.columns.size() ? t->table.columns[col].c_str() : nullptr;
}

double echolab_table_value(const echolab_table* t, size_t row, size_t col)
{
    if (!t || row >= t->table.rows.size() || col >= t->table.rows[row].size())
        return std::numeric_limits<double>::quiet_NaN();
    return t->table.rows[row][col];
}

int echolab_table_emit(const echolab_table* t, const char* format, char** bytes, size_t* len)
{
    ECHOLAB_NONNULL(t);
    ECHOLAB_NONNULL(format);
    ECHOLAB_NONNULL(bytes);
    *bytes = nullptr;
    return guarded([&] {
        const std::string s = emit(t->table, format);
        char* buf = static_cast<char*>(std::malloc(s.size() + 1));
        if (!buf)
            throw std::bad_alloc();
        std::memcpy(buf, s.data(), s.size());
        buf[s.size()] = '\0';
        *bytes = buf;
        if (len)
            *len = s.size();
    });
}

int echolab_table_write(const echolab_table* t, const char* format, const char* path)
{
    ECHOLAB_NONNULL(t);
    ECHOLAB_NONNULL(format);
    ECHOLAB_NONNULL(path);
    return guarded([&] { write_file(path, emit(t->table, format)); });
}

int echolab_table_parse_csv(const char* text, echolab_table** out)
{
    ECHOLAB_NONNULL(text);
    ECHOLAB_NONNULL(out);
    *out = nullptr;
    return guarded([&] {
        auto t = std::make_unique<echolab_table>();
        t->table = parse_csv(text);
        *out = t.release();
    });
}

void echolab_table_free(echolab_table* t)
{
    delete t;
}

int echolab_floquet_rotator(size_t N, double K, echolab_floquet** out)
{
    ECHOLAB_NONNULL(out);
    *out = nullptr;
    return guarded([&] { *out = new echolab_floquet{std::make_unique<RotatorFloquet>(N, K)}; });
}

int echolab_floquet_top(int two_spin, double K, double phi, echolab_floquet** out)
{
    ECHOLAB_NONNULL(out);
    *out = nullptr;
    return guarded([&] { *out = new echolab_floquet{std::make_unique<TopFloquet>(two_spin, K, phi)}; });
}

size_t echolab_floquet_dim(const echolab_floquet* f)
{
    return f ? f->engine->basis().dim() : 0;
}

void echolab_floquet_free(echolab_floquet* f)
{
    delete f;
}

int echolab_state_torus_packet(size_t N, double x0, double p0, double width, echolab_state** out)
{
    ECHOLAB_NONNULL(out);
    *out = nullptr;
    return guarded([&] { *out = new echolab_state{gaussian_torus(TorusGrid(N), {x0, p0, width})}; });
}

int echolab_state_spin_coherent(int two_spin, double theta, double phi, echolab_state** out)
{
    ECHOLAB_NONNULL(out);
    *out = nullptr;
    return guarded([&] { *out = new echolab_state{spin_coherent(two_spin, theta, phi)}; });
}

size_t echolab_state_dim(const echolab_state* s)
{
    return s ? s->psi.dim() : 0;
}

int echolab_state_amplitudes(const echolab_state* s, double* out, size_t n_doubles)
{
    ECHOLAB_NONNULL(s);
    ECHOLAB_NONNULL(out);
    if (n_doubles < 2 * s->psi.dim())
        return record(ECHOLAB_E_DIMENSION, "output buffer holds fewer than 2 * dim doubles");
    for (size_t i = 0; i < s->psi.dim(); ++i)
    {
        out[2 * i] = s->psi.vec()[static_cast<Eigen::Index>(i)].real();
        out[2 * i + 1] = s->psi.vec()[static_cast<Eigen::Index>(i)].imag();
    }
    g_error.clear();
    return ECHOLAB_OK;
}

int echolab_state_evolve(echolab_state* s, const echolab_floquet* f, long n)
{
    ECHOLAB_NONNULL(s);
    ECHOLAB_NONNULL(f);
    return guarded([&] { s->psi = apply(*f->engine, s->psi, n); });
}

void echolab_state_free(echolab_state* s)
{
    delete s;
}

int echolab_loschmidt(const echolab_state* psi0, const echolab_floquet* f0, const echolab_floquet* f, long n_max,
                      double* values)
{
    ECHOLAB_NONNULL(psi0);
    ECHOLAB_NONNULL(f0);
    ECHOLAB_NONNULL(f);
    ECHOLAB_NONNULL(values);
    return guarded([&] {
        const EchoSeries s = loschmidt(psi0->psi, *f0->engine, *f->engine, n_max);
        std::copy(s.values.begin(), s.values.end(), values);
    });
}

} // extern "C"
