#include <cstring>
#include <exception>
#include <functional>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "commands.hpp"
#include "config.hpp"
#include "logging.hpp"

using namespace morphkit::cli;

namespace {

// --config is read before the real parse so explicit flags override its values.
std::string find_config(int argc, char** argv) {
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--config") == 0 && i + 1 < argc) return argv[i + 1];
        if (std::strncmp(argv[i], "--config=", 9) == 0) return argv[i] + 9;
    }
    return {};
}

}  // namespace

int main(int argc, char** argv) {
    init_logging();

    RunConfig cfg;
    try {
        const std::string config_path = find_config(argc, argv);
        if (!config_path.empty()) cfg = load_config(config_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }

    CLI::App app{"morphkit: sperm head mask generation, contour refinement and soft mixup"};
    app.require_subcommand(1);
    std::string config_unused;
    app.add_option("--config", config_unused, "JSON config; flags given on the command line take precedence");

    std::string input = cfg.input.string();
    std::string output = cfg.output.string();
    auto common = [&](CLI::App* sub) {
        sub->add_option("--input,-i", input, "input directory or file");
        sub->add_option("--output,-o", output, "output directory");
        sub->add_option("--seed", cfg.seed, "random seed");
        sub->add_option("--workers,-j", cfg.workers, "worker threads")->check(CLI::PositiveNumber);
        sub->add_option("--config", config_unused, "JSON config; flags given on the command line take precedence");
    };

    auto* gen = app.add_subcommand("gen-masks", "pseudo masks and aligned head crops from raw images");
    common(gen);

    auto* ref = app.add_subcommand("refine", "refine pseudo masks with the closed-contour DP");
    common(ref);
    ref->add_option("--n", cfg.refine.n, "contour samples");
    ref->add_option("--m", cfg.refine.m, "points per normal (odd)");
    ref->add_option("--s", cfg.refine.s, "max index jump between neighbours");
    ref->add_option("--c", cfg.refine.c, "concavity penalty weight");
    ref->add_option("--half-len", cfg.refine.half_len, "normal half length in pixels");
    ref->add_flag("--exact-closure", cfg.refine.exact_closure, "solve one DP per closure pair");
    ref->add_flag("--overlay", cfg.overlay, "also write overlay images");

    auto* mx = app.add_subcommand("mix", "soft mixup batch from a manifest");
    common(mx);
    mx->add_option("--alpha", cfg.mix.alpha, "Beta(alpha, alpha) parameter");
    mx->add_option("--gamma", cfg.mix.gamma, "majority label weight");
    std::optional<double> lambda = cfg.lambda;
    mx->add_option("--lambda", lambda, "fixed mixing weight");
    mx->add_option("--subset", cfg.subset, "all | pa | ta")->check(CLI::IsMember({"all", "pa", "ta"}));

    auto* sp = app.add_subcommand("split", "stratified k-fold assignment");
    common(sp);
    sp->add_option("--k", cfg.k, "number of folds");
    sp->add_option("--subset", cfg.subset, "all | pa | ta")->check(CLI::IsMember({"all", "pa", "ta"}));

    auto* ev = app.add_subcommand("eval", "metrics from a predictions CSV");
    common(ev);
    std::optional<int> num_classes = cfg.num_classes;
    ev->add_option("--num-classes", num_classes, "number of classes");

    auto* sy = app.add_subcommand("synth", "write a small synthetic corpus");
    common(sy);
    sy->add_option("--count", cfg.count, "number of images");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }
    cfg.input = input;
    cfg.output = output;
    cfg.lambda = lambda;
    cfg.num_classes = num_classes;

    try {
        if (gen->parsed()) return cmd_gen_masks(cfg);
        if (ref->parsed()) return cmd_refine(cfg);
        if (mx->parsed()) return cmd_mix(cfg);
        if (sp->parsed()) return cmd_split(cfg);
        if (ev->parsed()) return cmd_eval(cfg);
        if (sy->parsed()) return cmd_synth(cfg);
    } catch (const std::exception& e) {
        spdlog::critical("{}", e.what());
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 2;
}
