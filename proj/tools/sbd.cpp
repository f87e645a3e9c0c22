#include <functional>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "sbd/error.hpp"
#include "sbd/pipeline.hpp"

int main(int argc, char** argv) {
    using sbd::pipeline::PipelineConfig;

    CLI::App app{"Domain-interest classification over social-media archives"};
    app.require_subcommand(1);
    app.set_config("--config", "", "TOML config file; command-line flags win");

    PipelineConfig config;
    app.add_option("--posts", config.posts, "posts.jsonl archive");
    app.add_option("--users", config.users, "users.jsonl archive");
    app.add_option("--handles", config.handles, "handles.tsv handle map");
    app.add_option("--stopwords", config.stopwords, "stopword list, one per line");
    app.add_option("--kb", config.kb, "gazetteer kb.json");
    app.add_option("--synonyms", config.synonyms, "synonyms.json aliases");
    app.add_option("--labels", config.labels, "labels.csv (user_id,label)");
    app.add_option("--out", config.out_dir, "output directory for batches")
        ->capture_default_str();
    app.add_option("--batch", config.batch, "input batch id (default: latest suitable)");
    app.add_option("--models-batch", config.models_batch,
                   "batch holding trained models (evaluate)");
    app.add_option("--user", config.user_id, "target user for top-entities");
    app.add_option("--seed", config.seed, "master random seed")->capture_default_str();
    app.add_option("--split-fraction", config.split_fraction,
                   "train fraction for the stratified split")
        ->capture_default_str();
    app.add_option("--families", config.families, "comma-separated model families")
        ->capture_default_str();
    app.add_option("--params", config.params,
                   "hyperparameter overrides, e.g. dt.max_depth=10,rf.n_trees=50");
    app.add_option("--normalize", config.normalize,
                   "feature scaling plan, e.g. x10=log,x13=minmax,x12=clip:0:100");
    app.add_option("--reference-time", config.reference_time,
                   "ISO-8601 reference instant (default: newest post)");
    app.add_option("--post-cap", config.post_cap, "most recent posts kept per user")
        ->capture_default_str();
    app.add_flag("--lowercase,!--no-lowercase", config.lowercase,
                 "case-fold text during cleansing");
    app.add_flag("--skip-bad-lines", config.skip_bad_lines,
                 "skip malformed archive lines instead of stopping");
    app.add_option("--top-k", config.top_k, "rows in the top-entities table")
        ->capture_default_str();
    app.add_option("--n-on", config.n_on, "synthetic on-topic users")
        ->capture_default_str();
    app.add_option("--n-off", config.n_off, "synthetic off-topic users")
        ->capture_default_str();
    app.add_option("--on-topic-fraction", config.on_topic_fraction,
                   "gazetteer token share for synthetic on-topic users")
        ->capture_default_str();

    struct Command {
        const char* name;
        const char* help;
        std::function<std::string(const PipelineConfig&)> run;
    };
    const Command commands[] = {
        {"ingest", "Parse, cleanse and persist a user corpus", sbd::pipeline::cmd_ingest},
        {"featurize", "Annotate a corpus and extract per-user features",
         sbd::pipeline::cmd_featurize},
        {"train", "Train the requested model families", sbd::pipeline::cmd_train},
        {"evaluate", "Score stored models on a feature batch", sbd::pipeline::cmd_evaluate},
        {"compare", "Train and evaluate families on one shared split",
         sbd::pipeline::cmd_compare},
        {"top-entities", "Most frequent entities for one user",
         sbd::pipeline::cmd_top_entities},
        {"synth", "Generate a deterministic synthetic corpus", sbd::pipeline::cmd_synth},
    };
    for (const auto& command : commands)
        app.add_subcommand(command.name, command.help)->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        for (const auto& command : commands)
            if (app.got_subcommand(command.name)) {
                std::cout << command.run(config) << std::endl;
                return 0;
            }
        std::cerr << "error: no subcommand selected\n";
        return 1;
    } catch (const sbd::UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const sbd::DataError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
