// echolab command-line runner. Talks to the library only through the C API.
#include <echolab/echolab.h>

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

namespace
{

int report(int status, const std::string& message)
{
    nlohmann::ordered_json j;
    j["error"] = echolab_status_name(status);
    j["code"] = status;
    j["message"] = message;
    std::cerr << j.dump() << '\n';
    return status == 0 ? 1 : status;
}

int report_last(int status)
{
    return report(status, echolab_last_error());
}

struct Flags
{
    std::string experiment;
    std::string config;
    std::string seed;
    std::string out;
    std::string format;
    int jobs = 0;
    bool deterministic = false;
    std::vector<std::string> sets;
};

// Flags override file entries; --set key=value reaches any model parameter.
std::vector<std::string> overrides(const Flags& f)
{
    std::vector<std::string> kv;
    if (!f.experiment.empty())
        kv.push_back("experiment=" + f.experiment);
    if (!f.seed.empty())
        kv.push_back("seed=" + f.seed);
    if (!f.out.empty())
        kv.push_back("out=" + f.out);
    if (!f.format.empty())
        kv.push_back("format=" + f.format);
    kv.insert(kv.end(), f.sets.begin(), f.sets.end());
    return kv;
}

int execute(const Flags& f, const char* base_text)
{
    const std::vector<std::string> kv = overrides(f);
    std::vector<const char*> ptrs;
    for (const auto& s : kv)
        ptrs.push_back(s.c_str());
    echolab_config* cfg = nullptr;
    int st = f.config.empty() ? echolab_config_parse(base_text, ptrs.data(), ptrs.size(), &cfg)
                              : echolab_config_load(f.config.c_str(), ptrs.data(), ptrs.size(), &cfg);
    if (st != ECHOLAB_OK)
        return report_last(st);
    echolab_table* table = nullptr;
    st = echolab_run(cfg, f.jobs, f.deterministic ? 1 : 0, &table);
    if (st != ECHOLAB_OK)
    {
        echolab_config_free(cfg);
        return report_last(st);
    }
    const std::string out = echolab_config_output(cfg);
    const std::string format = echolab_config_format(cfg);
    if (!out.empty() && out != "-")
        st = echolab_table_write(table, format.c_str(), out.c_str());
    else
    {
        char* bytes = nullptr;
        size_t len = 0;
        st = echolab_table_emit(table, format.c_str(), &bytes, &len);
        if (st == ECHOLAB_OK)
        {
            std::fwrite(bytes, 1, len, stdout);
            std::fflush(stdout);
            echolab_free(bytes);
        }
    }
    echolab_table_free(table);
    echolab_config_free(cfg);
    return st == ECHOLAB_OK ? 0 : report_last(st);
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{std::string("echolab ") + echolab_version() + ": echo and entanglement experiments on quantum maps"};
    app.fallthrough();
    app.require_subcommand(0, 1);
    Flags f;
    app.add_option("--experiment", f.experiment, "experiment kind (or use a subcommand)");
    app.add_option("--config", f.config, "key = value configuration file");
    app.add_option("--seed", f.seed, "random seed (mandatory unless given in the config)");
    app.add_option("--out", f.out, "output path; stdout when absent");
    app.add_option("--format", f.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--jobs", f.jobs, "worker threads; falls back to ECHOLAB_JOBS, then the core count");
    app.add_flag("--deterministic", f.deterministic, "ordered reductions (always on; recorded in provenance)");
    app.add_option("--set", f.sets, "override one parameter, key=value (repeatable)");

    std::vector<CLI::App*> subs;
    for (size_t i = 0; i < echolab_experiment_count(); ++i)
        subs.push_back(app.add_subcommand(echolab_experiment_name(i), std::string("run the ") +
                                                                          echolab_experiment_name(i) + " experiment"));

    std::string recipe;
    bool list = false;
    auto* repro = app.add_subcommand("repro", "run a bundled scaled-down recipe");
    repro->add_option("recipe", recipe, "recipe name");
    repro->add_flag("--list", list, "list recipes");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp& e)
    {
        return app.exit(e);
    }
    catch (const CLI::CallForAllHelp& e)
    {
        return app.exit(e);
    }
    catch (const CLI::ParseError& e)
    {
        return report(ECHOLAB_E_PARSE, e.what());
    }

    if (repro->parsed())
    {
        if (list || recipe.empty())
        {
            for (size_t i = 0; i < echolab_recipe_count(); ++i)
                std::cout << echolab_recipe_name(i) << "\t" << echolab_recipe_summary(i) << '\n';
            return recipe.empty() && !list ? report(ECHOLAB_E_PARSE, "repro needs a recipe name") : 0;
        }
        const char* text = nullptr;
        const int st = echolab_recipe_config(recipe.c_str(), &text);
        if (st != ECHOLAB_OK)
            return report_last(st);
        if (!f.config.empty())
            return report(ECHOLAB_E_PARSE, "repro does not take --config");
        return execute(f, text);
    }
    for (auto* s : subs)
        if (s->parsed())
        {
            if (!f.experiment.empty() && f.experiment != s->get_name())
                return report(ECHOLAB_E_PARSE, "--experiment disagrees with the subcommand");
            f.experiment = s->get_name();
        }
    if (f.experiment.empty() && f.config.empty())
        return report(ECHOLAB_E_PARSE, "no experiment given; use a subcommand, --experiment or --config");
    return execute(f, "");
}
