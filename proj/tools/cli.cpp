/*
 * Copyright 2026 The rfdiag Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <json.hpp>

#include "manifest.hpp"
#include "rfdiag/binary_io.hpp"
#include "rfdiag/dataset.hpp"
#include "rfdiag/impairments.hpp"
#include "rfdiag/metrics.hpp"
#include "rfdiag/mtlmodel.hpp"
#include "rfdiag/neuralnet.hpp"
#include "rfdiag/random.hpp"
#include "rfdiag/waveform.hpp"

namespace rfdiag::cli {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

/// Bad flag values discovered after parsing; reported with exit code 2.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

class Stopwatch {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fixed(double v, int digits = 6) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

SplitSizes parse_split_flag(const std::string& text) {
    std::vector<std::size_t> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            const long long v = std::stoll(item, &used);
            if (used != item.size() || v <= 0) throw std::invalid_argument(item);
            parts.push_back(static_cast<std::size_t>(v));
        } catch (const std::exception&) {
            throw UsageError("--split: '" + item + "' is not a positive integer");
        }
    }
    if (parts.size() != 3) throw UsageError("--split expects train,validation,test");
    return {parts[0], parts[1], parts[2]};
}

// ---------------------------------------------------------------- generate

struct GenerateOptions {
    std::string tier;
    std::size_t samples = 60000;
    std::string split = "40000,10000,10000";
    std::uint64_t seed = 42;
    std::string out;
    std::size_t symbols = 500;
    std::size_t oversample = 4;
    std::uint64_t waveform_seed = 1;
    double sample_rate = kDefaultSampleRateHz;
    int threads = 0;
};

int cmd_generate(const GenerateOptions& o, RunManifest& m, std::ostream& out) {
    DatasetConfig cfg;
    try {
        cfg.tier = parse_tier(o.tier);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    cfg.total_samples = o.samples;
    cfg.split = parse_split_flag(o.split);
    cfg.master_seed = o.seed;
    cfg.waveform = {o.symbols, o.oversample, o.waveform_seed, o.sample_rate};
    if (cfg.split.total() != cfg.total_samples)
        throw UsageError("--split " + o.split + " sums to " + std::to_string(cfg.split.total()) +
                         " but --samples is " + std::to_string(cfg.total_samples));
    try {
        cfg.validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }

    const Dataset ds = generate_dataset(cfg, resolve_threads(o.threads));
    write_dataset(ds, o.out);

    m.flags = {{"tier", std::string(to_string(cfg.tier))},
               {"samples", cfg.total_samples},
               {"split", o.split},
               {"seed", cfg.master_seed},
               {"symbols", o.symbols},
               {"oversample", o.oversample},
               {"waveform_seed", o.waveform_seed},
               {"sample_rate", o.sample_rate}};
    m.seeds = {{"master_seed", cfg.master_seed}, {"waveform_seed", o.waveform_seed}};
    m.outputs = {o.out, sidecar_path(o.out).string()};
    out << "wrote " << ds.size() << " samples (" << cfg.split.train << '/' << cfg.split.validation
        << '/' << cfg.split.test << ", tier " << to_string(cfg.tier) << ", width "
        << ds.feature_width << ") to " << o.out << '\n';
    return kOk;
}

// ---------------------------------------------------------------- train

struct TrainOptions {
    std::string data;
    std::string preset = "desk";
    std::optional<std::size_t> epochs;
    std::optional<std::size_t> batch;
    std::optional<double> lr;
    std::uint64_t seed = 1;
    bool no_shuffle = false;
    std::string out;
    std::string log;
    int threads = 0;
    std::size_t print_every = 10;
};

void write_history_csv(const TrainingHistory& h, const fs::path& path) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw std::runtime_error("cannot write '" + path.string() + "'");
    os << "epoch,task,split,accuracy,loss\n";
    for (const auto& r : h.epochs)
        for (const auto c : kComponents) {
            const auto k = static_cast<std::size_t>(c);
            os << r.epoch << ',' << to_string(c) << ",train," << fixed(r.train_accuracy[k]) << ','
               << fixed(r.train_loss[k]) << '\n';
            os << r.epoch << ',' << to_string(c) << ",validation,"
               << fixed(r.validation_accuracy[k]) << ',' << fixed(r.validation_loss[k]) << '\n';
        }
}

int cmd_train(const TrainOptions& o, RunManifest& m, std::ostream& out) {
    TrainConfig cfg;
    if (o.preset == "desk") cfg = TrainConfig::desk();
    else if (o.preset == "paper") cfg = TrainConfig::paper();
    else throw UsageError("--preset must be desk or paper");
    if (o.epochs) cfg.epochs = *o.epochs;
    if (o.batch) cfg.batch_size = *o.batch;
    if (o.lr) cfg.learning_rate = *o.lr;
    cfg.seed = o.seed;
    cfg.shuffle = !o.no_shuffle;
    try {
        cfg.validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }

    const Dataset ds = read_dataset(o.data);
    const MtlArchitecture arch;
    if (ds.feature_width != arch.input_width)
        throw std::runtime_error("dataset feature width " + std::to_string(ds.feature_width) +
                                 " does not match the model input width " +
                                 std::to_string(arch.input_width));

    MtlModel model = MtlModel::build(arch, cfg.seed);
    const json provenance = {
        {"train",
         {{"preset", o.preset},
          {"epochs", cfg.epochs},
          {"batch_size", cfg.batch_size},
          {"learning_rate", cfg.learning_rate},
          {"seed", cfg.seed},
          {"shuffle", cfg.shuffle}}},
        {"dataset",
         {{"tier", std::string(to_string(ds.config.tier))},
          {"master_seed", ds.config.master_seed},
          {"total_samples", ds.config.total_samples},
          {"split", {ds.config.split.train, ds.config.split.validation, ds.config.split.test}},
          {"waveform_seed", ds.config.waveform.seed},
          {"feature_width", ds.feature_width}}},
    };
    model.set_provenance(provenance.dump());

    const auto history =
        train(model, ds.view(Split::Train), ds.view(Split::Validation), cfg,
              [&](const EpochRecord& r) {
                  if (o.print_every == 0) return;
                  if (r.epoch % o.print_every != 0 && r.epoch != cfg.epochs && r.epoch != 1) return;
                  out << "epoch " << r.epoch << " loss " << fixed(r.total_loss, 4) << " val_acc";
                  for (const auto c : kComponents)
                      out << ' ' << to_string(c) << '='
                          << fixed(r.validation_accuracy[static_cast<std::size_t>(c)], 3);
                  out << '\n' << std::flush;
              });

    save_checkpoint(model, o.out);
    const fs::path log = o.log.empty() ? fs::path(o.out + ".history.csv") : fs::path(o.log);
    write_history_csv(history, log);

    const auto& last = history.epochs.back();
    out << "final validation accuracy:";
    for (const auto c : kComponents)
        out << ' ' << to_string(c) << '='
            << fixed(last.validation_accuracy[static_cast<std::size_t>(c)], 4);
    out << '\n';

    m.flags = {{"data", o.data},         {"preset", o.preset},
               {"epochs", cfg.epochs},   {"batch", cfg.batch_size},
               {"lr", cfg.learning_rate}, {"seed", cfg.seed},
               {"shuffle", cfg.shuffle}, {"out", o.out},
               {"log", log.string()}};
    m.seeds = {{"init_and_shuffle", cfg.seed}, {"dataset_master_seed", ds.config.master_seed}};
    m.inputs = {o.data};
    m.outputs = {o.out, log.string()};
    return kOk;
}

// ---------------------------------------------------------------- eval

struct EvalOptions {
    std::string model;
    std::string data;
    std::string split = "test";
    std::string out;
    double threshold = 0.5;
};

int cmd_eval(const EvalOptions& o, RunManifest& m, std::ostream& out) {
    Split split;
    try {
        split = parse_split(o.split);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    const Dataset ds = read_dataset(o.data);
    const MtlModel model = load_checkpoint(o.model);
    const SampleView view = ds.view(split);
    if (view.empty())
        throw std::runtime_error("dataset has no " + std::string(to_string(split)) + " split");
    if (view.feature_width != model.architecture().input_width)
        throw std::runtime_error("dataset feature width " + std::to_string(view.feature_width) +
                                 " does not match model input width " +
                                 std::to_string(model.architecture().input_width));

    const auto predictions = predict_all(model, view, o.threshold);
    const MetricsReport report = make_report(predictions, view.labels, ds.config.tier);

    std::ofstream os(o.out, std::ios::trunc);
    if (!os) throw std::runtime_error("cannot write '" + o.out + "'");
    write_metrics_csv(os, report);
    write_metrics_csv(out, report);

    m.flags = {{"model", o.model}, {"data", o.data}, {"split", std::string(to_string(split))},
               {"out", o.out},     {"threshold", o.threshold}};
    m.inputs = {o.model, o.data};
    m.outputs = {o.out};
    return kOk;
}

// ---------------------------------------------------------------- constellation

struct ConstellationOptions {
    ImpairmentParams params;
    std::size_t symbols = 500;
    std::size_t oversample = 4;
    std::uint64_t seed = 1;
    double sample_rate = kDefaultSampleRateHz;
    std::string out;
};

int cmd_constellation(const ConstellationOptions& o, RunManifest& m, std::ostream& out) {
    const WaveformConfig wf{o.symbols, o.oversample, o.seed, o.sample_rate};
    try {
        wf.validate();
        o.params.validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    const ComplexFrame clean = canonical_frame(wf);
    const ComplexFrame distorted = apply_chain(clean, o.params);

    std::ofstream file;
    std::ostream* os = &out;
    if (!o.out.empty()) {
        file.open(o.out, std::ios::trunc);
        if (!file) throw std::runtime_error("cannot write '" + o.out + "'");
        os = &file;
    }
    *os << "n,clean_re,clean_im,distorted_re,distorted_im\n";
    char buf[160];
    for (std::size_t n = 0; n < clean.size(); ++n) {
        std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g,%.17g\n", n,
                      clean.samples[n].real(), clean.samples[n].imag(),
                      distorted.samples[n].real(), distorted.samples[n].imag());
        *os << buf;
    }

    const auto& p = o.params;
    m.flags = {{"i_gain", p.i_gain},   {"q_gain", p.q_gain},
               {"qo", p.quad_offset_deg}, {"pn", p.phase_noise_deg},
               {"fo", p.freq_offset_hz}, {"i_offset", p.i_offset},
               {"q_offset", p.q_offset}, {"symbols", o.symbols},
               {"oversample", o.oversample}, {"sample_rate", o.sample_rate}};
    m.seeds = {{"waveform_seed", o.seed}};
    if (!o.out.empty()) m.outputs = {o.out};
    if (!p.quad_offset_realistic())
        std::cerr << "warning: |quadrature offset| >= 90 deg collapses the constellation\n";
    return kOk;
}

// ---------------------------------------------------------------- gradcheck

struct GradcheckOptions {
    std::size_t seeds = 1;
    std::uint64_t base_seed = 1;
    bool inject_fault = false;
    double step = 1e-5;
    double tolerance = 1e-4;
};

int cmd_gradcheck(const GradcheckOptions& o, RunManifest& m, std::ostream& out) {
    if (o.seeds == 0) throw UsageError("--seeds must be positive");
    constexpr std::size_t kBatch = 4;
    const std::size_t widths[] = {6, 5, 4, 3};

    double worst = 0.0;
    for (std::size_t s = 0; s < o.seeds; ++s) {
        const std::uint64_t seed = o.base_seed + s;
        Rng rng(seed, 0x47524144);  // "GRAD"
        Mlp net = Mlp::glorot(widths, Activation::ReLU, Activation::Sigmoid, rng);
        for (auto block : net.parameter_blocks())
            for (double& v : block) v += rng.uniform(-0.1, 0.1);
        Eigen::MatrixXd x(6, kBatch);
        Eigen::MatrixXd y(3, kBatch);
        for (Eigen::Index j = 0; j < x.cols(); ++j) {
            for (Eigen::Index i = 0; i < x.rows(); ++i) x(i, j) = rng.uniform(-1.0, 1.0);
            for (Eigen::Index i = 0; i < y.rows(); ++i) y(i, j) = rng.uniform() < 0.5 ? 0.0 : 1.0;
        }
        GradCheckOptions opts;
        opts.step = o.step;
        if (o.inject_fault) {
            // Fault the largest gradient entry so the injected error cannot hide in a zero.
            std::size_t flat = 0, target = 0;
            double largest = -1.0;
            for (auto block : gradient_blocks(backward(net, x, y)))
                for (double gv : block) {
                    if (std::abs(gv) > largest) {
                        largest = std::abs(gv);
                        target = flat;
                    }
                    ++flat;
                }
            opts.perturb_index = target;
        }
        const auto r = grad_check(net, x, y, opts);
        out << "seed " << seed << ": " << r.checked << " parameters, max relative error "
            << r.max_relative_error << '\n';
        worst = std::max(worst, r.max_relative_error);
    }
    const bool pass = worst < o.tolerance;
    out << "max relative error " << worst << (pass ? " < " : " >= ") << o.tolerance << " -> "
        << (pass ? "PASS" : "FAIL") << '\n';
    m.flags = {{"seeds", o.seeds},         {"base_seed", o.base_seed},
               {"inject_fault", o.inject_fault}, {"step", o.step},
               {"tolerance", o.tolerance}};
    return pass ? kOk : kRuntimeError;
}

// ---------------------------------------------------------------- replay

std::vector<std::string> replace_flag(std::vector<std::string> argv, const std::string& flag,
                                      const std::string& value) {
    for (std::size_t i = 0; i < argv.size(); ++i) {
        if (argv[i] == flag && i + 1 < argv.size()) {
            argv[i + 1] = value;
            return argv;
        }
        if (argv[i].rfind(flag + "=", 0) == 0) {
            argv[i] = flag + "=" + value;
            return argv;
        }
    }
    argv.push_back(flag);
    argv.push_back(value);
    return argv;
}

}  // namespace

unsigned resolve_threads(int flag_value) {
    if (flag_value > 0) return static_cast<unsigned>(flag_value);
    if (const char* env = std::getenv("RFDIAG_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return static_cast<unsigned>(v);
    }
    return 1;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"rfdiag: RF impairment simulation and multi-task distorted-component identification",
                 "rfdiag"};
    app.require_subcommand(1);

    GenerateOptions gen;
    auto* g = app.add_subcommand("generate", "Generate a labeled impairment dataset");
    g->add_option("--tier", gen.tier, "Device quality tier: high, middle, low")->required();
    g->add_option("--samples", gen.samples, "Total number of samples");
    g->add_option("--split", gen.split, "train,validation,test sizes");
    g->add_option("--seed", gen.seed, "Master seed for impairment draws");
    g->add_option("--out", gen.out, "Output dataset path")->required();
    g->add_option("--symbols", gen.symbols, "QPSK symbols per frame");
    g->add_option("--oversample", gen.oversample, "Samples per symbol");
    g->add_option("--waveform-seed", gen.waveform_seed, "Seed of the shared clean frame");
    g->add_option("--sample-rate", gen.sample_rate, "Sample rate in Hz");
    g->add_option("--threads", gen.threads, "Worker threads (default RFDIAG_THREADS or 1)");

    TrainOptions tr;
    auto* t = app.add_subcommand("train", "Train the multi-task classifier");
    t->add_option("--data", tr.data, "Dataset file")->required();
    t->add_option("--preset", tr.preset, "desk (300 epochs, batch 64, lr 1e-3) or paper")
        ->check(CLI::IsMember({"desk", "paper"}));
    t->add_option("--epochs", tr.epochs, "Override preset epochs");
    t->add_option("--batch", tr.batch, "Override preset batch size");
    t->add_option("--lr", tr.lr, "Override preset learning rate");
    t->add_option("--seed", tr.seed, "Initialisation and shuffling seed");
    t->add_flag("--no-shuffle", tr.no_shuffle, "Keep the training order fixed");
    t->add_option("--out", tr.out, "Checkpoint path")->required();
    t->add_option("--log", tr.log, "Training-history CSV (default <out>.history.csv)");
    t->add_option("--threads", tr.threads, "Worker threads (training itself is single-threaded)");
    t->add_option("--print-every", tr.print_every, "Progress line every N epochs (0 = quiet)");

    EvalOptions ev;
    auto* e = app.add_subcommand("eval", "Per-component accuracy, precision, recall, F1");
    e->add_option("--model", ev.model, "Checkpoint path")->required();
    e->add_option("--data", ev.data, "Dataset file")->required();
    e->add_option("--split", ev.split, "train, validation or test");
    e->add_option("--out", ev.out, "Results CSV")->required();
    e->add_option("--threshold", ev.threshold, "Decision threshold on probabilities");

    ConstellationOptions co;
    auto* c = app.add_subcommand("constellation", "Dump clean and distorted frames as CSV");
    c->add_option("--i-gain", co.params.i_gain, "I branch gain");
    c->add_option("--q-gain", co.params.q_gain, "Q branch gain");
    c->add_option("--qo", co.params.quad_offset_deg, "Quadrature offset (deg)");
    c->add_option("--pn", co.params.phase_noise_deg, "Phase rotation (deg)");
    c->add_option("--fo", co.params.freq_offset_hz, "Frequency offset (Hz)");
    c->add_option("--i-offset", co.params.i_offset, "I DC offset");
    c->add_option("--q-offset", co.params.q_offset, "Q DC offset");
    c->add_option("--symbols", co.symbols, "QPSK symbols");
    c->add_option("--oversample", co.oversample, "Samples per symbol");
    c->add_option("--seed", co.seed, "Waveform seed");
    c->add_option("--sample-rate", co.sample_rate, "Sample rate in Hz");
    c->add_option("--out", co.out, "Output CSV (default stdout)");

    GradcheckOptions gc;
    auto* k = app.add_subcommand("gradcheck", "Finite-difference check of backpropagation");
    k->add_option("--seeds", gc.seeds, "Number of seeded networks");
    k->add_option("--base-seed", gc.base_seed, "First seed");
    k->add_flag("--inject-fault", gc.inject_fault, "Scale the largest analytic gradient by 1.01");
    k->add_option("--step", gc.step, "Finite-difference step");
    k->add_option("--tolerance", gc.tolerance, "Pass threshold on max relative error");

    std::string replay_manifest;
    std::string replay_out;
    auto* r = app.add_subcommand("replay", "Re-run a command from its manifest");
    r->add_option("--manifest", replay_manifest, "Manifest JSON")->required();
    r->add_option("--out", replay_out, "Replacement output path")->required();

    std::vector<const char*> argv{"rfdiag"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& ex) {
        const int code = app.exit(ex, out, err);
        return code == 0 ? kOk : kUsageError;
    }

    RunManifest manifest;
    manifest.argv = args;
    const Stopwatch clock;
    try {
        int code = kOk;
        fs::path primary;
        if (*g) {
            manifest.command = "generate";
            code = cmd_generate(gen, manifest, out);
            primary = gen.out;
        } else if (*t) {
            manifest.command = "train";
            code = cmd_train(tr, manifest, out);
            primary = tr.out;
        } else if (*e) {
            manifest.command = "eval";
            code = cmd_eval(ev, manifest, out);
            primary = ev.out;
        } else if (*c) {
            manifest.command = "constellation";
            code = cmd_constellation(co, manifest, out);
            primary = co.out;
        } else if (*k) {
            manifest.command = "gradcheck";
            return cmd_gradcheck(gc, manifest, out);
        } else if (*r) {
            const RunManifest old = read_manifest(replay_manifest);
            auto argv2 = replace_flag(old.argv, "--out", replay_out);
            if (old.command == "train") argv2 = replace_flag(argv2, "--log", replay_out + ".history.csv");
            return run(argv2, out, err);
        }
        if (code == kOk && !primary.empty()) {
            manifest.duration_s = clock.seconds();
            write_manifest(manifest, manifest_path(primary));
        }
        return code;
    } catch (const UsageError& ex) {
        err << "error: " << ex.what() << "\n" << app.get_subcommands().front()->help();
        return kUsageError;
    } catch (const std::exception& ex) {
        err << "error: " << ex.what() << '\n';
        return kRuntimeError;
    }
}

int run(const std::vector<std::string>& args) { return run(args, std::cout, std::cerr); }

}  // namespace rfdiag::cli
