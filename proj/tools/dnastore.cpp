// dnastore: file <-> DNA codec, training, analysis and channel simulation.
//
// Exit codes: 0 success, 2 argument/usage errors, 3 I/O errors, 4 model
// mismatch, 5 uncorrectable rows during decode, 6 format errors,
// 7 training divergence.
#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>

#include "dnastore/channel.hpp"
#include "dnastore/config_file.hpp"
#include "dnastore/learner/serialize.hpp"
#include "dnastore/learner/train.hpp"
#include "dnastore/package_io.hpp"
#include "dnastore/pipeline.hpp"
#include "dnastore/util.hpp"

namespace {

using namespace dnastore;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;
constexpr int kExitModelMismatch = 4;
constexpr int kExitUncorrectable = 5;
constexpr int kExitFormat = 6;
constexpr int kExitDiverged = 7;

config_file::ToolConfig load_config(const std::string& explicit_path) {
    config_file::ToolConfig cfg;
    std::string path = explicit_path;
    if (path.empty()) {
        if (const char* env = std::getenv("DNASTORE_CONFIG")) path = env;
    }
    if (!path.empty()) config_file::load_into(cfg, path);
    return cfg;
}

thermo::NnParameterTable thermo_table(const config_file::ToolConfig& cfg) {
    if (!cfg.thermo_params_file.empty())
        return thermo::NnParameterTable::from_file(cfg.thermo_params_file);
    return thermo::NnParameterTable::unified();
}

// Loads the model file and wires it into the pipeline configuration.
void attach_model(config_file::ToolConfig& cfg, const std::string& flag_path) {
    const std::string path = !flag_path.empty() ? flag_path : cfg.model_path;
    if (path.empty()) throw CLI::ValidationError("--model", "learned mode requires a model file");
    auto loaded = learner::load_model(path);
    cfg.pipeline.model = std::make_shared<learner::ModelParameters>(std::move(loaded.params));
    cfg.pipeline.model_hash = loaded.content_hash;
}

void print_decode_summary(const pipeline::DecodeReport& report) {
    std::size_t corrected_symbols = 0;
    for (const auto& row : report.rows) corrected_symbols += row.errors_found;
    std::cout << "rows = " << report.rows.size() << "\n";
    std::cout << "uncorrectable_rows = " << report.uncorrectable_rows << "\n";
    std::cout << "symbol_errors_corrected = " << corrected_symbols << "\n";
    if (!report.all_corrected()) {
        std::cout << "failed_rows =";
        for (const auto& row : report.rows)
            if (row.status == rs::DecodeStatus::uncorrectable)
                std::cout << " b" << row.block << "_r" << row.row;
        std::cout << "\n";
    }
}

int run_encode(const std::string& input, const std::string& output, const std::string& mode,
               const std::string& model_flag, const std::string& config_path) {
    auto cfg = load_config(config_path);
    if (!mode.empty()) cfg.pipeline.mode = pipeline::mode_from_name(mode);
    if (cfg.pipeline.mode == pipeline::Mode::learned) attach_model(cfg, model_flag);
    const auto bytes = read_file_bytes(input);
    const auto pkg = pipeline::encode(bytes, cfg.pipeline);
    package_io::write_package(output, pkg);
    std::cout << "sequences = " << pkg.sequences.size() << "\n";
    std::cout << "blocks = " << pkg.header.block_count << "\n";
    return kExitOk;
}

int run_decode(const std::string& input, const std::string& output, const std::string& model_flag,
               const std::string& config_path) {
    auto cfg = load_config(config_path);
    const auto pkg = package_io::read_package(input);
    cfg.pipeline.mode = pkg.header.mode;
    cfg.pipeline.rs = pkg.header.rs;
    cfg.pipeline.rows_per_block = pkg.header.rows_per_block;
    if (cfg.pipeline.mode == pipeline::Mode::learned) attach_model(cfg, model_flag);
    auto [bytes, report] = pipeline::decode(pkg, cfg.pipeline);
    atomic_write_file(output, bytes.data(), bytes.size());
    print_decode_summary(report);
    return report.all_corrected() ? kExitOk : kExitUncorrectable;
}

int run_analyze(const std::string& input, const std::string& metrics, std::size_t window_flag,
                const std::string& report_path, const std::string& local_gc_path,
                const std::string& config_path) {
    auto cfg = load_config(config_path);
    if (window_flag > 0) cfg.analysis_window = window_flag;

    std::set<std::string> wanted;
    std::istringstream items(metrics);
    std::string item;
    while (std::getline(items, item, ',')) {
        if (item != "gc" && item != "tm" && item != "mfe" && item != "hairpin" &&
            item != "homopolymer")
            throw CLI::ValidationError("--metrics", "unknown metric name: " + item);
        wanted.insert(item);
    }

    const auto fasta_bytes = read_file_bytes(input);
    pipeline::StoragePackage pkg;
    pkg.sequences = package_io::parse_fasta(std::string(fasta_bytes.begin(), fasta_bytes.end()),
                                            /*require_package_names=*/false);
    // When the FASTA sits inside a package directory, the manifest provides
    // the payload size for the density figure.
    const auto manifest = std::filesystem::path(input).parent_path() / package_io::kManifestName;
    if (std::filesystem::exists(manifest)) {
        const auto manifest_bytes = read_file_bytes(manifest);
        pkg.header =
            package_io::parse_manifest(std::string(manifest_bytes.begin(), manifest_bytes.end()));
    }

    const auto table = thermo_table(cfg);
    const auto report = channel::metrics_report(pkg, table, cfg.thermo, cfg.hairpin,
                                                cfg.analysis_window, cfg.analysis_step);
    std::ostringstream out;
    out.precision(6);
    out << std::fixed;
    if (wanted.count("gc")) {
        out << "gc_mean_percent = " << report.gc_mean << "\n";
        out << "gc_std_percent = " << report.gc_std << "\n";
    }
    if (wanted.count("tm")) {
        out << "tm_mean_c = " << report.tm_mean << "\n";
        out << "tm_std_c = " << report.tm_std << "\n";
    }
    if (wanted.count("mfe")) {
        out << "mfe_mean_kcal_per_mol_nt = " << report.mfe_mean << "\n";
        out << "mfe_std_kcal_per_mol_nt = " << report.mfe_std << "\n";
    }
    if (wanted.count("homopolymer")) {
        out << "homopolymer_max_nt = " << report.homopolymer_max << "\n";
        for (const auto& [run, count] : report.homopolymer_histogram)
            out << "homopolymer_count_run_" << run << " = " << count << "\n";
    }
    if (wanted.count("hairpin")) out << "hairpin_total = " << report.hairpin_total << "\n";
    if (pkg.header.original_length > 0)
        out << "net_information_density_bits_per_nt = " << report.net_information_density << "\n";
    const std::string text = out.str();
    if (report_path.empty())
        std::cout << text;
    else
        atomic_write_file(report_path, text);
    if (!local_gc_path.empty()) atomic_write_file(local_gc_path, channel::local_gc_csv(report));
    return kExitOk;
}

int run_train(const std::string& corpus_path, const std::string& out_model,
              const std::string& trace_path, const std::string& config_path) {
    auto cfg = load_config(config_path);
    const auto bytes = read_file_bytes(corpus_path);
    // Pack the corpus exactly like the encoder will see it.
    pipeline::PipelineConfig pack_cfg = cfg.pipeline;
    pack_cfg.mode = pipeline::Mode::identity;  // packing needs no model
    auto [blocks, header] = pipeline::pack_file(bytes, pack_cfg);
    if (blocks.empty()) throw FormatError("train: corpus is empty");

    learner::MaskSpec mask{cfg.pipeline.mask.masked_symbol_indices};
    const auto result = learner::train(blocks, cfg.model, cfg.train, cfg.loss, mask);
    learner::save_model(out_model, result.params);

    std::ostringstream trace;
    trace.precision(12);
    for (std::size_t e = 0; e < result.loss_trace.size(); ++e)
        trace << e << " " << result.loss_trace[e] << "\n";
    const std::string trace_file = trace_path.empty() ? out_model + ".loss.txt" : trace_path;
    atomic_write_file(trace_file, trace.str());
    if (!result.loss_trace.empty()) {
        std::cout << "initial_loss = " << result.loss_trace.front() << "\n";
        std::cout << "final_loss = " << result.loss_trace.back() << "\n";
    }
    std::cout << "model = " << out_model << "\n";
    return kExitOk;
}

int run_simulate(const std::string& input, double error_rate, std::uint64_t seed,
                 const std::string& sweep, const std::string& model_flag,
                 const std::string& config_path) {
    auto cfg = load_config(config_path);
    if (cfg.pipeline.mode == pipeline::Mode::learned) attach_model(cfg, model_flag);
    std::vector<double> rates;
    if (!sweep.empty()) {
        std::istringstream in(sweep);
        std::string item;
        while (std::getline(in, item, ',')) {
            try {
                rates.push_back(std::stod(item));
            } catch (...) {
                throw CLI::ValidationError("--sweep", "bad rate: " + item);
            }
        }
    } else {
        rates.push_back(error_rate);
    }
    for (double rate : rates)
        if (rate < 0.0 || rate > 1.0)
            throw CLI::ValidationError("--error-rate", "rate must lie in [0, 1]");

    const auto bytes = read_file_bytes(input);
    std::cout << "rate reconstruction_rate block_failure_rate uncorrectable_rows\n";
    for (double rate : rates) {
        channel::ChannelConfig cc{rate, seed};
        const auto report = channel::evaluate_roundtrip(bytes, cfg.pipeline, cc);
        std::ostringstream line;
        line.precision(6);
        line << std::fixed << rate << " " << report.reconstruction_rate << " "
             << report.block_failure_rate << " " << report.decode_report.uncorrectable_rows;
        std::cout << line.str() << "\n";
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"DNA data-storage codec toolkit"};
    app.require_subcommand(0, 1);
    bool show_version = false;
    app.add_flag("--version", show_version, "print format versions and exit");

    std::string config_path;
    app.add_option("--config", config_path, "key-value configuration file");

    auto* encode = app.add_subcommand("encode", "encode a file into a storage package");
    std::string enc_input, enc_output, enc_mode, enc_model, enc_config;
    encode->add_option("--input", enc_input, "input file")->required();
    encode->add_option("--output", enc_output, "output package directory")->required();
    encode->add_option("--mode", enc_mode, "identity or learned")
        ->check(CLI::IsMember({"identity", "learned"}));
    encode->add_option("--model", enc_model, "model file (learned mode)");
    encode->add_option("--config", enc_config, "configuration file");

    auto* decode = app.add_subcommand("decode", "decode a storage package back into a file");
    std::string dec_input, dec_output, dec_model, dec_config;
    decode->add_option("--input", dec_input, "package directory")->required();
    decode->add_option("--output", dec_output, "output file")->required();
    decode->add_option("--model", dec_model, "model file (learned mode)");
    decode->add_option("--config", dec_config, "configuration file");

    auto* analyze = app.add_subcommand("analyze", "sequence metrics of a FASTA file");
    std::string ana_input, ana_metrics = "gc,tm,mfe,hairpin,homopolymer", ana_report, ana_csv,
                ana_config;
    std::size_t ana_window = 0;
    analyze->add_option("--input", ana_input, "FASTA file")->required();
    analyze->add_option("--metrics", ana_metrics, "comma list: gc,tm,mfe,hairpin,homopolymer");
    analyze->add_option("--window", ana_window, "local GC window (nt)");
    analyze->add_option("--report", ana_report, "write the report here instead of stdout");
    analyze->add_option("--local-gc-csv", ana_csv, "write the averaged local GC series as CSV");
    analyze->add_option("--config", ana_config, "configuration file");

    auto* train = app.add_subcommand("train", "train a model on a corpus file");
    std::string trn_corpus, trn_model, trn_trace, trn_config;
    train->add_option("--corpus", trn_corpus, "corpus file")->required();
    train->add_option("--out-model", trn_model, "output model file")->required();
    train->add_option("--trace", trn_trace, "loss trace file (default <model>.loss.txt)");
    train->add_option("--config", trn_config, "configuration file");

    auto* simulate = app.add_subcommand("simulate", "substitution-channel round-trip evaluation");
    std::string sim_input, sim_sweep, sim_model, sim_config;
    double sim_rate = 0.0;
    std::uint64_t sim_seed = 0;
    simulate->add_option("--input", sim_input, "input file")->required();
    simulate->add_option("--error-rate", sim_rate, "substitution probability per nucleotide");
    simulate->add_option("--seed", sim_seed, "channel seed");
    simulate->add_option("--sweep", sim_sweep, "comma list of rates (overrides --error-rate)");
    simulate->add_option("--model", sim_model, "model file (learned mode)");
    simulate->add_option("--config", sim_config, "configuration file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitUsage;
    }

    if (show_version) {
        std::cout << "manifest_format_version = " << pipeline::kManifestFormatVersion << "\n";
        std::cout << "model_format_version = " << learner::kModelFormatVersion << "\n";
        return kExitOk;
    }

    try {
        if (encode->parsed())
            return run_encode(enc_input, enc_output, enc_mode, enc_model,
                              enc_config.empty() ? config_path : enc_config);
        if (decode->parsed())
            return run_decode(dec_input, dec_output, dec_model,
                              dec_config.empty() ? config_path : dec_config);
        if (analyze->parsed())
            return run_analyze(ana_input, ana_metrics, ana_window, ana_report, ana_csv,
                               ana_config.empty() ? config_path : ana_config);
        if (train->parsed())
            return run_train(trn_corpus, trn_model, trn_trace,
                             trn_config.empty() ? config_path : trn_config);
        if (simulate->parsed())
            return run_simulate(sim_input, sim_rate, sim_seed, sim_sweep, sim_model,
                                sim_config.empty() ? config_path : sim_config);
        std::cerr << app.help();
        return kExitUsage;
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ModelMismatchError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitModelMismatch;
    } catch (const TrainingDivergedError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDiverged;
    } catch (const FormatError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFormat;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
}
