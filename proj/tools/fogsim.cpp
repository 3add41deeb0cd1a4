#include "fog/harness/runner.hpp"
#include "fog/nn/gradcheck.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

using namespace fog;

namespace {

struct Overrides
{
    std::string config;
    std::uint64_t seed = 0;
    std::string agent, alloc, traffic, params, out;
    int scenario_case = 0;
    std::int64_t iters = 0;
};

void add_scenario_flags(CLI::App* cmd, Overrides& o)
{
    cmd->add_option("--config", o.config, "scenario JSON file")->check(CLI::ExistingFile);
    cmd->add_option("--seed", o.seed, "run seed");
    cmd->add_option("--agent", o.agent, "drqn|dcqn|dqn|baseline")
        ->check(CLI::IsMember({"drqn", "dcqn", "dqn", "baseline"}));
    cmd->add_option("--alloc", o.alloc, "baseline allocation rule")->check(CLI::IsMember({"rr", "pq"}));
    cmd->add_option("--case", o.scenario_case, "slice case")->check(CLI::Range(1, 3));
    cmd->add_option("--traffic", o.traffic, "normal|heavy")->check(CLI::IsMember({"normal", "heavy"}));
    cmd->add_option("--params", o.params, "paper-table|desk-feasible")
        ->check(CLI::IsMember({"paper-table", "desk-feasible"}));
    cmd->add_option("--iters", o.iters, "slots to simulate")->check(CLI::NonNegativeNumber);
    cmd->add_option("--out", o.out, "output directory")->required();
}

harness::ScenarioConfig resolve(const CLI::App* cmd, const Overrides& o)
{
    harness::ScenarioConfig c = o.config.empty() ? harness::ScenarioConfig{} : harness::load_scenario(o.config);
    if (cmd->count("--seed"))
        c.seed = o.seed;
    if (cmd->count("--agent"))
        c.agent = harness::agent_kind_from_string(o.agent);
    if (cmd->count("--alloc"))
        c.alloc = baselines::alloc_rule_from_string(o.alloc);
    if (cmd->count("--case"))
        c.scenario_case = o.scenario_case;
    if (cmd->count("--traffic")) {
        c.traffic = o.traffic;
        c.lambda.reset();
    }
    if (cmd->count("--params"))
        c.params = harness::parameter_set_from_string(o.params);
    if (cmd->count("--iters"))
        c.iterations = o.iters;
    c.validate();
    return c;
}

void print_rates(const std::string& label, const harness::RunMetrics& m)
{
    auto pct = [](const std::optional<double>& v) {
        char buf[32];
        if (!v)
            return std::string("n/a");
        std::snprintf(buf, sizeof buf, "%.2f%%", 100.0 * *v);
        return std::string(buf);
    };
    const auto delay = m.window.avg_delay_ms(m.layout.slot_ms);
    std::cout << label << "success " << pct(m.window.success_rate()) << "  overflow " << pct(m.window.overflow_rate())
              << "  timeout " << pct(m.window.timeout_rate()) << "  delay "
              << (delay ? std::to_string(*delay) + " ms" : std::string("n/a")) << "  (tasks created in slots "
              << m.window_begin() << ".." << m.layout.iterations << ")\n";
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"fog network simulator and multi-agent Q-learning harness"};
    app.require_subcommand(1);

    Overrides run_o;
    auto* run_cmd = app.add_subcommand("run", "run one scenario");
    add_scenario_flags(run_cmd, run_o);
    bool quiet = false;
    run_cmd->add_flag("--quiet", quiet, "no progress output");

    Overrides sweep_o;
    std::vector<double> lambdas;
    auto* sweep_cmd = app.add_subcommand("sweep", "one run per arrival rate");
    add_scenario_flags(sweep_cmd, sweep_o);
    sweep_cmd->add_option("--lambda", lambdas, "arrival rates")->delimiter(',')->required()->check(CLI::Range(0.0, 1.0));

    auto* grad_cmd = app.add_subcommand("gradcheck", "finite-difference check of all architectures");
    nn::GradCheckOptions gopt;
    int seq = 10, obs_dim = 8, actions = 50;
    grad_cmd->add_option("--draws", gopt.draws, "random networks per architecture");
    grad_cmd->add_option("--seed", gopt.seed, "seed");
    grad_cmd->add_option("--seq", seq, "window length");
    grad_cmd->add_option("--obs", obs_dim, "observation size");
    grad_cmd->add_option("--actions", actions, "action count");

    std::string log_path;
    auto* replay_cmd = app.add_subcommand("replay", "recompute metrics from an event log");
    replay_cmd->add_option("--log", log_path, "events.log")->required()->check(CLI::ExistingFile);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run_cmd) {
            const auto config = resolve(run_cmd, run_o);
            harness::RunOptions opt;
            opt.out_dir = run_o.out;
            if (!quiet)
                opt.progress = [&](std::int64_t t) { std::cerr << "\rslot " << t << "/" << config.iterations << std::flush; };
            const auto r = harness::run(config, opt);
            if (!quiet)
                std::cerr << '\n';
            print_rates("", r.metrics);
            std::cout << "wrote " << run_o.out << '\n';
        } else if (*sweep_cmd) {
            const auto config = resolve(sweep_cmd, sweep_o);
            harness::RunOptions opt;
            opt.out_dir = sweep_o.out;
            const auto points = harness::sweep(config, lambdas, opt);
            for (const auto& p : points)
                print_rates("lambda " + std::to_string(p.lambda) + ": ", p.result.metrics);
        } else if (*grad_cmd) {
            bool ok = true;
            for (auto arch : {nn::Architecture::DRQN, nn::Architecture::DCQN, nn::Architecture::DQN}) {
                const auto rep = nn::check_architecture(arch, obs_dim, actions, seq, gopt);
                std::cout << nn::to_string(arch) << ": " << rep.probes << " probes, " << rep.failures
                          << " failures, max rel error " << rep.max_rel_error << " at " << rep.worst.where << '\n';
                ok = ok && rep.passed();
            }
            return ok ? 0 : 1;
        } else if (*replay_cmd) {
            const auto m = harness::compute_metrics_file(log_path);
            print_rates("", m);
            std::cout << m.to_json().dump(2) << '\n';
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
