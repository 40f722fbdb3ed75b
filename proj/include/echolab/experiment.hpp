#pragma once
// Experiment runner: key = value configs, dispatch into the modules, tabular output.

#include "echolab/core.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace echolab
{

enum class ExperimentKind
{
    Loschmidt,
    Prepared,
    Displacement,
    Boltzmann,
    Purity,
    Ldos,
    Lyapunov,
    Wigner,
    ClassicalFidelity,
    SpinToy,
};

const char* experiment_name(ExperimentKind k);
ExperimentKind experiment_from_name(std::string_view name); // E_PARSE on unknown names
const std::vector<ExperimentKind>& all_experiments();

using KeyValues = std::vector<std::pair<std::string, std::string>>;

// Effective configuration: every schema key is present, defaults filled in,
// values kept in canonical text form so the echo is exact.
class ExperimentConfig
{
public:
    ExperimentKind kind() const { return kind_; }
    std::uint64_t seed() const { return seed_; }
    const std::string& output() const { return output_; }
    const std::string& format() const { return format_; }

    double real(std::string_view key) const;
    long integer(std::string_view key) const;
    const std::string& text(std::string_view key) const;

    // Model parameters in schema order, followed by experiment, seed and output settings.
    KeyValues echo() const;

private:
    friend ExperimentConfig parse_config(std::string_view, const KeyValues&);
    ExperimentKind kind_ = ExperimentKind::Loschmidt;
    std::uint64_t seed_ = 0;
    std::string output_;
    std::string format_ = "csv";
    KeyValues params_;
};

// Sections group keys for readability only; lines are `key = value`, '#' or ';' start comments.
// Overrides (from flags) replace file entries. Errors: Parse, Range, UnknownKey.
ExperimentConfig parse_config(std::string_view text, const KeyValues& overrides = {});
ExperimentConfig load_config(const std::string& path, const KeyValues& overrides = {});

// Keys accepted by an experiment, with defaults ("" marks a required key).
struct ConfigKey
{
    std::string name;
    std::string fallback;
    std::string help;
};
std::vector<ConfigKey> config_keys(ExperimentKind k);

struct ResultTable
{
    std::string experiment;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    KeyValues provenance; // config echo, version, wall time, derived summaries
};

struct RunOptions
{
    int jobs = 0;
    bool deterministic = false;
};

ResultTable run(const ExperimentConfig& cfg, const RunOptions& opts = {});

// CSV: '#'-prefixed `key = value` provenance lines, header row, shortest round-trip floats.
std::string emit_csv(const ResultTable& t);
std::string emit_json(const ResultTable& t);
std::string emit(const ResultTable& t, std::string_view format);
ResultTable parse_csv(std::string_view text);
void write_file(const std::string& path, const std::string& bytes);

std::string format_double(double v);

// Scaled-down acceptance recipes bundled with the `repro` command.
struct Recipe
{
    std::string name;
    std::string summary;
    std::string config;
};
const std::vector<Recipe>& repro_recipes();
const Recipe& find_recipe(std::string_view name); // E_UNKNOWN_KEY when missing

} // namespace echolab
