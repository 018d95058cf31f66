#pragma once

#include "boxdesign/boxdesign.hpp"

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace boxdesign::cli {

// A failure tagged with the pipeline stage it happened in.
class StageError : public std::runtime_error {
  public:
    StageError(const std::string& stage, const std::string& message)
      : std::runtime_error("[" + stage + "] " + message), stage_(stage) {}
    [[nodiscard]] const std::string& stage() const noexcept { return stage_; }

  private:
    std::string stage_;
};

template <typename Fn>
auto stage(const std::string& name, Fn&& fn) {
    spdlog::debug("stage {} start", name);
    try {
        return fn();
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError(name, e.what());
    }
}

inline void configure_logging() {
    static const bool once = [] {
        auto logger = spdlog::stderr_color_mt("boxdesign");
        spdlog::set_default_logger(logger);
        spdlog::set_pattern("[%l] %v");
        return true;
    }();
    (void)once;
    const char* level = std::getenv("BOXDESIGN_LOG");
    spdlog::set_level(level ? spdlog::level::from_str(level) : spdlog::level::warn);
}

inline std::string fmt_real(double value) { return io::detail::format_double(value); }

inline std::uint64_t config_hash(const std::string& echo) { return boxdesign::detail::fnv1a(echo); }

inline void write_config_echo(std::ostream& out, const RunConfig& config) {
    std::istringstream lines(config.echo());
    for (std::string line; std::getline(lines, line);) out << "# " << line << '\n';
}

inline void write_reports(std::ostream& out, const std::vector<AssortmentReport>& reports,
                          const std::optional<Comparison>& comparison) {
    out << "assortment,corpus,orders,total_boxes_used,packed_volume,box_volume,utilization,unpacked_items,box_ids\n";
    for (std::size_t r = 0; r < reports.size(); ++r) {
        const auto& rep = reports[r];
        std::string ids;
        for (const auto& id : rep.assortment) ids += (ids.empty() ? "" : ";") + id;
        out << (r == 0 ? "candidate" : "baseline") << ',' << rep.corpus_label << ',' << rep.orders << ','
            << rep.total_boxes_used << ',' << fmt_real(rep.packed_volume) << ',' << fmt_real(rep.box_volume) << ','
            << fmt_real(rep.utilization) << ',' << rep.unpacked_items << ',' << ids << '\n';
    }
    if (comparison) {
        out << "# utilization_improvement_pct is relative: 100 * (candidate - baseline) / baseline\n";
        out << "box_reduction_pct,utilization_improvement_pct\n";
        out << fmt_real(comparison->box_reduction_pct) << ',' << fmt_real(comparison->utilization_improvement_pct)
            << '\n';
    }
}

inline std::ofstream open_output(const std::string& dir, const std::string& name) {
    std::filesystem::create_directories(dir);
    const auto    path = (std::filesystem::path(dir) / name).string();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io::IoError("cannot write '" + path + "'");
    spdlog::info("writing {}", path);
    return out;
}

inline void require(const std::string& value, const char* flag) {
    if (value.empty()) throw ValidationError(std::string("missing required --") + flag);
}

struct Inputs {
    std::vector<BoxType> boxes;
    io::SkuCatalog       skus;
    std::vector<Order>   orders;
};

inline Inputs load_inputs(const RunConfig& config, bool need_orders) {
    Inputs inputs;
    require(config.boxes, "boxes");
    inputs.boxes = io::read_boxes(config.boxes);
    if (need_orders) {
        require(config.skus, "skus");
        require(config.orders, "orders");
        inputs.skus   = io::read_skus(config.skus);
        inputs.orders = io::read_orders(config.orders, inputs.skus);
    }
    return inputs;
}

inline void cmd_pack(const RunConfig& config) {
    const auto inputs  = stage("load", [&] { return load_inputs(config, true); });
    const auto results = stage("pack", [&] { return pack_corpus(inputs.orders, inputs.boxes, config.threads); });
    stage("write", [&] {
        auto trace = open_output(config.out, "trace.jsonl");
        for (const auto& result : results) io::write_trace(trace, result);
        auto report = open_output(config.out, "report.csv");
        write_config_echo(report, config);
        write_reports(report, {summarize(results, inputs.boxes, "corpus")}, std::nullopt);
        return 0;
    });
}

inline void cmd_evaluate(const RunConfig& config) {
    const auto inputs   = stage("load", [&] { return load_inputs(config, true); });
    const auto baseline = stage("load", [&] {
        return config.baseline.empty() ? std::vector<BoxType>{} : io::read_boxes(config.baseline);
    });
    std::vector<AssortmentReport> reports;
    std::optional<Comparison>     comparison;
    stage("evaluate", [&] {
        reports.push_back(evaluate_assortment(inputs.boxes, inputs.orders, "corpus", config.threads));
        if (!baseline.empty()) {
            reports.push_back(evaluate_assortment(baseline, inputs.orders, "corpus", config.threads));
            comparison = compare(reports[0], reports[1]);
        }
        return 0;
    });
    stage("write", [&] {
        auto out = open_output(config.out, "report.csv");
        write_config_echo(out, config);
        write_reports(out, reports, comparison);
        return 0;
    });
}

inline void cmd_weights(const RunConfig& config) {
    const auto inputs = stage("load", [&] { return load_inputs(config, true); });
    const auto pool   = stage("load", [&] { return CandidatePool(inputs.boxes); });
    const auto weights = stage("weights", [&] {
        return compute_weights(estimate_effective_volumes(inputs.orders, pool, config.threads), pool,
                               config.params.rho);
    });
    stage("write", [&] {
        auto out = open_output(config.out, "weights.csv");
        io::write_weights(out, pool, weights);
        return 0;
    });
}

inline void cmd_costs(const RunConfig& config) {
    const auto inputs = stage("load", [&] { return load_inputs(config, false); });
    const auto pool   = stage("load", [&] { return CandidatePool(inputs.boxes); });
    const auto cost   = stage("costs", [&] { return build_cost_matrix(pool, config.params.delta, config.params.alpha); });
    stage("write", [&] {
        std::vector<std::string> ids;
        for (const auto& box : pool) ids.push_back(box.id());
        auto out = open_output(config.out, "costs.csv");
        io::write_cost_matrix(out, cost, ids, ids);
        return 0;
    });
}

struct SelectOptions {
    std::string costs;
    std::string weights;
    std::string method   = "greedy";
    std::size_t max_iter = 100;
};

inline void cmd_select(const RunConfig& config, const SelectOptions& options) {
    require(options.costs, "costs");
    require(options.weights, "weights");
    const auto matrix  = stage("load", [&] { return io::read_cost_matrix(options.costs); });
    const auto weights = stage("load", [&] {
        auto labeled = io::read_weights(options.weights);
        if (labeled.ids != matrix.col_ids) throw ValidationError("weights box_ids do not match cost matrix columns");
        return labeled;
    });
    const SelectionProblem<double> problem = stage("select", [&] {
        if (config.k < 1) throw ValidationError("missing required --k");
        return SelectionProblem<double>(matrix.cost, weights.weights.w, config.k);
    });
    const auto selection = stage("select", [&] {
        if (options.method == "greedy") return solve_greedy(problem);
        if (options.method == "em") return solve_em(problem, std::nullopt, options.max_iter, config.seed);
        if (options.method == "exhaustive") return solve_exhaustive(problem);
        throw ValidationError("unknown --method '" + options.method + "' (greedy, em, exhaustive)");
    });
    stage("write", [&] {
        auto out = open_output(config.out, "selection.csv");
        io::write_selection(out, problem, selection, matrix.row_ids);
        return 0;
    });
}

inline void write_grid(std::ostream& out, const std::vector<GridResult>& results) {
    out << "rho,delta,alpha,box_reduction_pct,utilization_improvement_pct,objective,box_ids\n";
    for (const auto& r : results) {
        std::string ids;
        for (const auto& id : r.box_ids) ids += (ids.empty() ? "" : ";") + id;
        out << fmt_real(r.params.rho) << ',' << fmt_real(r.params.delta) << ',' << fmt_real(r.params.alpha) << ','
            << fmt_real(r.box_reduction_pct) << ',' << fmt_real(r.utilization_improvement_pct) << ','
            << io::detail::format_double17(r.selection.objective) << ',' << ids << '\n';
    }
}

/// split -> grid search -> model selection -> final fit on train+validation -> test evaluation.
inline void cmd_design(RunConfig config) {
    const auto inputs = stage("load", [&] { return load_inputs(config, true); });
    const auto pool   = stage("load", [&] { return CandidatePool(inputs.boxes); });
    const auto baseline = stage("load", [&] {
        require(config.baseline, "baseline");
        return io::read_boxes(config.baseline);
    });
    if (config.k == 0) config.k = baseline.size();
    const auto grid = stage("config", [&] {
        if (config.threads < 1) throw ValidationError("threads must be >= 1");
        return config.grid_settings();
    });

    const auto split = stage("split", [&] { return split_corpus(inputs.orders, config.split); });
    spdlog::info("split: {} train, {} validation, {} test", split.train.size(), split.validation.size(),
                 split.test.size());

    const auto results = stage("grid_search", [&] {
        return grid_search(split.train, split.validation, pool, baseline, config.k, grid, {config.threads, true});
    });
    const auto choice = stage("select_model", [&] { return select_model(std::span<const GridResult>(results)); });
    if (choice.sacrifices_boxes) spdlog::warn("every grid setting uses more boxes than the baseline");

    std::vector<Order> merged = split.train;
    merged.insert(merged.end(), split.validation.begin(), split.validation.end());
    const auto model = stage("finalize", [&] { return finalize(merged, pool, choice.params, config.k, config.threads); });
    const auto chosen = selected_boxes(pool, model.selection);

    std::vector<AssortmentReport> reports;
    std::optional<Comparison>     comparison;
    stage("evaluate", [&] {
        reports.push_back(evaluate_assortment(chosen, split.test, "test", config.threads));
        reports.push_back(evaluate_assortment(baseline, split.test, "test", config.threads));
        comparison = compare(reports[0], reports[1]);
        return 0;
    });

    stage("write", [&] {
        auto grid_out = open_output(config.out, "grid.csv");
        write_grid(grid_out, results);

        auto weights_out = open_output(config.out, "weights.csv");
        io::write_weights(weights_out, pool, model.weights);

        const auto cost = build_cost_matrix(pool, choice.params.delta, choice.params.alpha);
        const SelectionProblem<double> problem(cost, model.weights.w, config.k);
        std::vector<std::string>       ids;
        for (const auto& box : pool) ids.push_back(box.id());
        auto selection_out = open_output(config.out, "selection.csv");
        io::write_selection(selection_out, problem, model.selection, ids);

        auto report_out = open_output(config.out, "final_report.csv");
        write_config_echo(report_out, config);
        report_out << "# chosen rho=" << fmt_real(choice.params.rho) << " delta=" << fmt_real(choice.params.delta)
                   << " alpha=" << fmt_real(choice.params.alpha)
                   << (choice.sacrifices_boxes ? " (flag: no setting kept the baseline box count)" : "") << '\n';
        write_reports(report_out, reports, comparison);

        const auto echo = config.echo();
        auto manifest = open_output(config.out, "manifest.txt");
        manifest << "tool=boxdesign\nversion=" << kVersion << "\nseed=" << config.seed << "\nconfig_hash=" << std::hex
                 << std::setw(16) << std::setfill('0') << config_hash(echo) << std::dec << '\n'
                 << "train_orders=" << split.train.size() << "\nvalidation_orders=" << split.validation.size()
                 << "\ntest_orders=" << split.test.size() << "\ngrid_settings=" << grid.size() << '\n'
                 << "files=grid.csv,weights.csv,selection.csv,final_report.csv\n"
                 << echo;
        return 0;
    });
}

/// Entry point shared by the executable and the tests. Returns the process exit code.
inline int run(std::vector<std::string> args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    configure_logging();
    CLI::App app{"Design shipping-box assortments from historical orders", "boxdesign"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    RunConfig                  config;
    std::string                config_path;
    std::map<std::string, std::string> flags;
    SelectOptions              select_options;

    auto add_common = [&](CLI::App* cmd, const std::vector<std::string>& keys) {
        cmd->add_option("--config", config_path, "flat key = value config file; flags win");
        for (const auto& key : keys) {
            cmd->add_option_function<std::string>("--" + key, [&flags, key](const std::string& v) { flags[key] = v; },
                                                  "see README");
        }
    };
    auto* pack     = app.add_subcommand("pack", "pack orders with an assortment; write trace and report");
    auto* weights  = app.add_subcommand("weights", "estimate effective volumes and box weights");
    auto* costs    = app.add_subcommand("costs", "build the substitution cost matrix");
    auto* select   = app.add_subcommand("select", "pick k rows from a cost matrix");
    auto* design   = app.add_subcommand("design", "full split / grid search / final design run");
    auto* evaluate = app.add_subcommand("evaluate", "evaluate an assortment, optionally against a baseline");

    add_common(pack, {"boxes", "skus", "orders", "threads", "out"});
    add_common(weights, {"boxes", "skus", "orders", "rho", "threads", "out"});
    add_common(costs, {"boxes", "delta", "alpha", "out"});
    add_common(select, {"k", "seed", "out"});
    select->add_option("--costs", select_options.costs, "cost matrix CSV");
    select->add_option("--weights", select_options.weights, "weights CSV (box_id,ev,w)");
    select->add_option("--method", select_options.method, "greedy | em | exhaustive")
        ->check(CLI::IsMember({"greedy", "em", "exhaustive"}));
    select->add_option("--max-iter", select_options.max_iter, "EM iteration cap")->check(CLI::PositiveNumber);
    add_common(design, {"boxes", "skus", "orders", "baseline", "k", "rho", "delta", "alpha", "grid", "split", "seed",
                        "threads", "out"});
    add_common(evaluate, {"boxes", "skus", "orders", "baseline", "threads", "out"});

    std::vector<const char*> argv{"boxdesign"};
    for (const auto& arg : args) argv.push_back(arg.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    try {
        stage("config", [&] {
            if (!config_path.empty()) {
                for (const auto& [key, value] : read_config_file(config_path)) {
                    if (!flags.count(key)) apply_setting(config, key, value);
                }
            }
            for (const auto& [key, value] : flags) apply_setting(config, key, value);
            if (config.threads < 1) throw ValidationError("threads must be >= 1");
            return 0;
        });
        if (pack->parsed()) cmd_pack(config);
        if (weights->parsed()) cmd_weights(config);
        if (costs->parsed()) cmd_costs(config);
        if (select->parsed()) cmd_select(config, select_options);
        if (design->parsed()) cmd_design(config);
        if (evaluate->parsed()) cmd_evaluate(config);
    } catch (const std::exception& e) {
        err << "boxdesign: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

}  // namespace boxdesign::cli
