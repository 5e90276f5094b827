// Command line driver for the imagined-annotation PLSA experiment.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "plsavw/pipeline.hpp"

using namespace plsavw;

namespace {

struct CommonFlags {
    RunConfig cfg;
    std::string mode_name = "threshold";

    void add_to(CLI::App* app) {
        app->add_option("--topics", cfg.topics, "Number of PLSA topics")->capture_default_str();
        app->add_option("--tau", cfg.tau, "Imagination threshold")->capture_default_str();
        app->add_option("--mode", mode_name, "Imagination mode: threshold|topK|off")
            ->capture_default_str();
        app->add_option("--top-k", cfg.top_k, "Imagined keywords kept per document in topK mode")
            ->capture_default_str();
        app->add_option("--annotate-k", cfg.annotate_k, "Predicted keywords per test image")
            ->capture_default_str();
        app->add_option("--retrieval-m", cfg.retrieval_m, "Top-M pool for retrieval precision")
            ->capture_default_str();
        app->add_option("--seed", cfg.seed, "Random seed")->capture_default_str();
        app->add_option("--max-iters", cfg.em.max_iters, "EM iteration cap")
            ->capture_default_str();
        app->add_option("--rel-tol", cfg.em.rel_tol, "EM relative LL stopping tolerance")
            ->capture_default_str();
        app->add_option("--threads", cfg.em.n_threads, "EM worker threads")
            ->capture_default_str();
    }

    RunConfig resolve() const {
        RunConfig out = cfg;
        if (mode_name == "threshold")
            out.mode = ImaginationMode::threshold;
        else if (mode_name == "topK")
            out.mode = ImaginationMode::top_k;
        else if (mode_name == "off")
            out.mode = ImaginationMode::off;
        else
            throw CLI::ValidationError("--mode must be threshold, topK, or off");
        return out;
    }
};

void write_annotations(const std::string& path, const AnnotationRun& run) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot open for writing: " + path);
    const std::size_t n = run.predicted.size();
    const std::size_t q = run.scores.empty() ? 0 : run.scores[0].size();
    const std::size_t k = run.predicted.empty() ? 0 : run.predicted[0].size();
    out << n << ' ' << q << ' ' << k << '\n';
    for (const auto& ids : run.predicted) {
        for (std::size_t i = 0; i < ids.size(); ++i)
            out << ids[i] << (i + 1 == ids.size() ? '\n' : ' ');
    }
    char buf[64];
    for (const auto& row : run.scores) {
        for (std::size_t j = 0; j < row.size(); ++j) {
            std::snprintf(buf, sizeof(buf), "%.17g", row[j]);
            out << buf << (j + 1 == row.size() ? '\n' : ' ');
        }
    }
    if (!out)
        throw std::runtime_error("write failure: " + path);
}

AnnotationRun read_annotations(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open annotations file: " + path);
    std::size_t n, q, k;
    if (!(in >> n >> q >> k))
        throw std::runtime_error(path + ": malformed annotations header");
    AnnotationRun run;
    run.predicted.assign(n, std::vector<std::size_t>(k));
    run.scores.assign(n, std::vector<double>(q));
    run.ground_truth.assign(n, {});
    for (auto& ids : run.predicted)
        for (auto& id : ids)
            if (!(in >> id))
                throw std::runtime_error(path + ": truncated predictions");
    for (auto& row : run.scores)
        for (auto& v : row)
            if (!(in >> v))
                throw std::runtime_error(path + ": truncated scores");
    return run;
}

void print_report(const MetricsReport& r) {
    std::printf("AP %.2f  mAP %.2f  RP %.2f  RSI %.2f\n", r.ap, r.map, r.rp, r.rsi);
}

int run(int argc, char** argv) {
    CLI::App app{"Imagined-annotation PLSA experiment runner"};
    app.require_subcommand(1);

    // synth
    auto* synth = app.add_subcommand("synth", "Generate a synthetic loosely-annotated corpus");
    SyntheticSpec spec;
    std::string out_truth, out_observed;
    synth->add_option("--n-docs", spec.n_docs)->capture_default_str();
    synth->add_option("--n-words", spec.n_words)->capture_default_str();
    synth->add_option("--n-blobs", spec.n_blobs)->capture_default_str();
    synth->add_option("--n-topics-true", spec.n_topics_true)->capture_default_str();
    synth->add_option("--words-per-doc", spec.words_per_doc)->capture_default_str();
    synth->add_option("--blobs-per-doc", spec.blobs_per_doc)->capture_default_str();
    synth->add_option("--drop-rate", spec.drop_rate)->capture_default_str();
    synth->add_option("--seed", spec.seed)->capture_default_str();
    synth->add_option("--out-truth", out_truth, "Full-truth dataset path")->required();
    synth->add_option("--out-observed", out_observed, "Observed dataset path")->required();

    // convert
    auto* convert = app.add_subcommand("convert", "Convert a corel-jmlr sample to native format");
    std::string convert_in, convert_out, convert_split;
    convert->add_option("--input", convert_in, "Sample directory")->required();
    convert->add_option("--split", convert_split, "Split prefix: '' | test_1_ | test_3_");
    convert->add_option("--output", convert_out, "Native dataset path")->required();

    // imagine
    auto* imagine = app.add_subcommand("imagine", "Augment a dataset with imagined annotations");
    CommonFlags imagine_flags;
    std::string imagine_in, imagine_out, imagine_word_sim, imagine_blob_sim;
    imagine->add_option("--data", imagine_in, "Training dataset (native)")->required();
    imagine->add_option("--out", imagine_out, "Augmented dataset path")->required();
    imagine->add_option("--out-word-sim", imagine_word_sim, "Word similarity matrix path");
    imagine->add_option("--out-blob-sim", imagine_blob_sim, "Blob similarity matrix path");
    imagine_flags.add_to(imagine);

    // train
    auto* train_cmd = app.add_subcommand("train", "Train PLSA on a dataset's word counts");
    CommonFlags train_flags;
    std::string train_in, train_model;
    train_cmd->add_option("--data", train_in, "Training dataset (native)")->required();
    train_cmd->add_option("--out-model", train_model)->required();
    train_flags.add_to(train_cmd);

    // fold
    auto* fold = app.add_subcommand("fold", "Fold blob features into a trained model");
    CommonFlags fold_flags;
    std::string fold_model_in, fold_data, fold_model_out;
    fold->add_option("--model", fold_model_in)->required();
    fold->add_option("--data", fold_data, "Dataset whose blob counts are folded in")->required();
    fold->add_option("--out-model", fold_model_out)->required();
    fold_flags.add_to(fold);

    // annotate
    auto* annotate_cmd = app.add_subcommand("annotate", "Annotate test images with a model");
    CommonFlags annotate_flags;
    std::string ann_model, ann_test, ann_blob_sim, ann_out;
    annotate_cmd->add_option("--model", ann_model)->required();
    annotate_cmd->add_option("--test", ann_test, "Test dataset (native)")->required();
    annotate_cmd->add_option("--blob-sim", ann_blob_sim,
                             "Training-derived blob similarity; enables test-time imagination");
    annotate_cmd->add_option("--out", ann_out, "Annotations file")->required();
    annotate_flags.add_to(annotate_cmd);

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "Evaluate an annotations file");
    std::string eval_ann, eval_truth, eval_report;
    std::size_t eval_m = 20;
    eval_cmd->add_option("--annotations", eval_ann)->required();
    eval_cmd->add_option("--truth", eval_truth, "Dataset supplying ground-truth words")->required();
    eval_cmd->add_option("--retrieval-m", eval_m)->capture_default_str();
    eval_cmd->add_option("--out", eval_report, "Report file");

    // pipeline
    auto* pipeline_cmd = app.add_subcommand("pipeline", "Run the full experiment end to end");
    CommonFlags pipe_flags;
    std::string pipe_train, pipe_test, pipe_truth, pipe_model, pipe_report;
    pipeline_cmd->add_option("--train", pipe_train)->required();
    pipeline_cmd->add_option("--test", pipe_test)->required();
    pipeline_cmd->add_option("--truth", pipe_truth,
                             "Optional dataset overriding the ground-truth words");
    pipeline_cmd->add_option("--out-model", pipe_model);
    pipeline_cmd->add_option("--out-report", pipe_report);
    pipe_flags.add_to(pipeline_cmd);

    // compare
    auto* compare_cmd = app.add_subcommand("compare", "PLSA-vw vs PLSA-words over seeds");
    CommonFlags cmp_flags;
    std::string cmp_train, cmp_test, cmp_truth, cmp_out;
    std::vector<std::uint64_t> cmp_seeds;
    compare_cmd->add_option("--train", cmp_train)->required();
    compare_cmd->add_option("--test", cmp_test)->required();
    compare_cmd->add_option("--truth", cmp_truth);
    compare_cmd->add_option("--seeds", cmp_seeds, "Seeds, one pipeline pair per seed")
        ->delimiter(',')
        ->required();
    compare_cmd->add_option("--out", cmp_out, "Comparison table file");
    cmp_flags.add_to(compare_cmd);

    CLI11_PARSE(app, argc, argv);

    if (synth->parsed()) {
        auto corpus = generate_synthetic(spec);
        write_dataset(corpus.full_truth, out_truth);
        write_dataset(corpus.observed, out_observed);
        std::printf("wrote %s and %s (%zu docs)\n", out_truth.c_str(), out_observed.c_str(),
                    corpus.observed.n_docs());
    } else if (convert->parsed()) {
        auto ds = load_dataset(convert_in, DatasetFormat::corel_jmlr, convert_split);
        write_dataset(ds, convert_out);
        std::printf("wrote %s (%zu docs, %zu words, %zu blobs)\n", convert_out.c_str(),
                    ds.n_docs(), ds.word_vocab.size(), ds.blob_vocab.size());
    } else if (imagine->parsed()) {
        auto cfg = imagine_flags.resolve();
        if (cfg.mode == ImaginationMode::off)
            throw std::runtime_error("[imagine] --mode off leaves nothing to do");
        auto ds = load_dataset(imagine_in, DatasetFormat::native);
        auto r = imagine_pipeline(ds, cfg.imagination());
        Dataset aug = ds;
        aug.words = r.words_aug;
        aug.blobs = r.blobs_aug;
        write_dataset(aug, imagine_out);
        if (!imagine_word_sim.empty())
            r.word_sim.save(imagine_word_sim);
        if (!imagine_blob_sim.empty())
            r.blob_sim.save(imagine_blob_sim);
        std::printf("wrote %s (+%zu imagined word entries)\n", imagine_out.c_str(),
                    r.words_aug.nonzero_count() - ds.words.nonzero_count());
    } else if (train_cmd->parsed()) {
        auto cfg = train_flags.resolve();
        auto ds = load_dataset(train_in, DatasetFormat::native);
        EmOptions em = cfg.em;
        em.seed = cfg.seed;
        auto result = train_plsa(ds.words, cfg.topics, em);
        result.model.save(train_model);
        std::printf("trained T=%zu, %zu iterations, final LL %.6f\n", cfg.topics,
                    result.ll_trace.size(), result.ll_trace.back());
    } else if (fold->parsed()) {
        auto cfg = fold_flags.resolve();
        auto model = PlsaModel::load(fold_model_in);
        auto ds = load_dataset(fold_data, DatasetFormat::native);
        EmOptions em = cfg.em;
        em.seed = cfg.seed;
        auto result = fold_in_features(model, ds.blobs, em);
        result.model.save(fold_model_out);
        std::printf("folded blobs, %zu iterations, final LL %.6f\n", result.ll_trace.size(),
                    result.ll_trace.back());
    } else if (annotate_cmd->parsed()) {
        auto cfg = annotate_flags.resolve();
        auto model = PlsaModel::load(ann_model);
        auto test = load_dataset(ann_test, DatasetFormat::native);
        EmOptions em = cfg.em;
        em.seed = cfg.seed;
        CountMatrix test_blobs = test.blobs;
        if (!ann_blob_sim.empty()) {
            auto blob_sim = SimilarityMatrix::load(ann_blob_sim);
            test_blobs = augment(test.blobs, imagine_counts(test.blobs, blob_sim));
        }
        auto mixtures = fold_in_documents(model, test_blobs, em).mixtures;
        AnnotationRun run;
        run.scores = annotate(model, mixtures);
        for (const auto& row : run.scores)
            run.predicted.push_back(top_keywords(row, cfg.annotate_k));
        run.ground_truth.assign(test.n_docs(), {});
        write_annotations(ann_out, run);
        std::printf("annotated %zu test images -> %s\n", test.n_docs(), ann_out.c_str());
    } else if (eval_cmd->parsed()) {
        auto run = read_annotations(eval_ann);
        auto truth = load_dataset(eval_truth, DatasetFormat::native);
        if (truth.n_docs() != run.predicted.size())
            throw std::runtime_error("[eval] annotations and truth dataset disagree on N");
        for (std::size_t i = 0; i < truth.n_docs(); ++i) {
            std::set<std::size_t> gt;
            for (const auto& [j, v] : truth.words.row_entries(i))
                gt.insert(j);
            run.ground_truth[i] = std::move(gt);
        }
        auto report = evaluate(run, truth.word_vocab.size(), eval_m);
        print_report(report);
        if (!eval_report.empty())
            report.save(eval_report);
    } else if (pipeline_cmd->parsed()) {
        auto cfg = pipe_flags.resolve();
        auto train = load_dataset(pipe_train, DatasetFormat::native);
        auto test = load_dataset(pipe_test, DatasetFormat::native);
        std::optional<CountMatrix> truth;
        if (!pipe_truth.empty())
            truth = load_dataset(pipe_truth, DatasetFormat::native).words;
        auto result = run_pipeline(cfg, train, test, truth ? &*truth : nullptr);
        print_report(result.report);
        if (!pipe_model.empty())
            result.model.save(pipe_model);
        if (!pipe_report.empty())
            result.report.save(pipe_report);
    } else if (compare_cmd->parsed()) {
        auto cfg = cmp_flags.resolve();
        auto train = load_dataset(cmp_train, DatasetFormat::native);
        auto test = load_dataset(cmp_test, DatasetFormat::native);
        std::optional<CountMatrix> truth;
        if (!cmp_truth.empty())
            truth = load_dataset(cmp_truth, DatasetFormat::native).words;
        auto table = compare_methods(cfg, train, test, cmp_seeds, truth ? &*truth : nullptr);
        std::fputs(table.to_text().c_str(), stdout);
        if (!cmp_out.empty()) {
            std::ofstream out(cmp_out);
            if (!out)
                throw std::runtime_error("cannot open for writing: " + cmp_out);
            out << table.to_text();
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
