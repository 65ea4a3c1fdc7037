// granul: train, apply, and compare tokenizers at five granularities.
//
// Data goes to stdout; logs go to stderr. Exit codes: 0 success, 2 usage
// error, 3 data or model error.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "granul/analytics.hpp"
#include "granul/budget.hpp"
#include "granul/decode.hpp"
#include "granul/granul.hpp"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;

std::vector<std::string> split_tokens(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> tokens;
  std::string token;
  while (in >> token) tokens.push_back(token);
  return tokens;
}

std::string format_kwh(double kwh) {
  char buf[64];
  double rounded2 = std::round(kwh * 100.0) / 100.0;
  if (std::abs(rounded2 - kwh) < 1e-9)
    std::snprintf(buf, sizeof(buf), "%.2f", kwh);
  else
    std::snprintf(buf, sizeof(buf), "%.3f", kwh);
  return buf;
}

struct TrainOptions {
  std::string method;
  std::string input;
  std::string lexicon;
  std::string filter = "none";
  std::string format = "line";
  std::string out;
  std::size_t vocab_size = 0;
  bool vocab_size_set = false;
};

int run_train(const TrainOptions& opt) {
  granul::NormalizationConfig norm;
  const std::size_t threads = granul::configured_threads();

  if (opt.method == "char" && opt.vocab_size_set &&
      opt.vocab_size != granul::kByteVocabSize) {
    std::cerr << "granul: char vocabulary size is fixed at "
              << granul::kByteVocabSize << "\n";
    return kExitUsage;
  }
  if (opt.method != "char" && !opt.vocab_size_set) {
    std::cerr << "granul: --vocab-size is required for method " << opt.method
              << "\n";
    return kExitUsage;
  }
  if (opt.method == "morph" && opt.lexicon.empty()) {
    std::cerr << "granul: --lexicon is required for method morph\n";
    return kExitUsage;
  }
  if (opt.method != "char" && opt.input.empty()) {
    std::cerr << "granul: --input is required for method " << opt.method
              << "\n";
    return kExitUsage;
  }

  granul::DocumentFilter filter = opt.filter == "turkish-heuristic"
                                      ? granul::turkish_heuristic_filter()
                                      : granul::keep_all_filter();

  std::size_t kept = 0, dropped = 0;
  granul::WordCounts counts;
  if (!opt.input.empty()) {
    auto docs = granul::ingest(opt.input,
                               granul::corpus_format_from_string(opt.format));
    auto filtered = granul::filter_documents(std::move(docs), filter);
    kept = filtered.kept.size();
    dropped = filtered.dropped;
    counts = granul::count_words(filtered.kept, norm, threads);
  }

  std::unique_ptr<granul::Tokenizer> model;
  if (opt.method == "char") {
    model = std::make_unique<granul::ByteTokenizer>(norm);
  } else if (opt.method == "bpe") {
    model = std::make_unique<granul::SubwordTokenizer>(
        granul::train_bpe(counts, opt.vocab_size, norm));
  } else if (opt.method == "wordpiece") {
    model = std::make_unique<granul::SubwordTokenizer>(
        granul::train_wordpiece(counts, opt.vocab_size, norm));
  } else if (opt.method == "word") {
    model = std::make_unique<granul::LexicalTokenizer>(
        granul::train_wordlevel(counts, opt.vocab_size, norm));
  } else {
    auto lexicon = granul::lexicon_load(opt.lexicon);
    model = std::make_unique<granul::LexicalTokenizer>(granul::train_morph(
        counts, std::move(lexicon), opt.vocab_size, norm));
  }

  granul::save_model(*model, opt.out);
  std::cerr << "documents kept=" << kept << " dropped=" << dropped << "\n"
            << "vocabulary size=" << model->vocab().size() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tokenizer toolkit for agglutinative languages"};
  app.require_subcommand(1);

  TrainOptions train_opt;
  auto* train = app.add_subcommand("train", "train a tokenizer model");
  train->add_option("--method", train_opt.method, "tokenizer granularity")
      ->required()
      ->check(CLI::IsMember({"char", "bpe", "wordpiece", "morph", "word"}));
  train->add_option("--input", train_opt.input, "corpus file");
  train
      ->add_option("--vocab-size", train_opt.vocab_size,
                   "target vocabulary size (including specials)")
      ->each([&](const std::string&) { train_opt.vocab_size_set = true; });
  train->add_option("--lexicon", train_opt.lexicon,
                    "segmentation lexicon (morph)");
  train->add_option("--filter", train_opt.filter, "document filter")
      ->check(CLI::IsMember({"none", "turkish-heuristic"}));
  train->add_option("--format", train_opt.format, "corpus format")
      ->check(CLI::IsMember({"line", "blank-line"}));
  train->add_option("--out", train_opt.out, "output model directory")
      ->required();

  std::string model_dir, input_path, corpus_format = "line";
  std::size_t max_len = 514;
  bool wrap = true, print_ids = false;
  auto* encode = app.add_subcommand("encode", "encode documents");
  encode->add_option("--model", model_dir)->required();
  encode->add_option("--input", input_path)->required();
  encode->add_option("--format", corpus_format)
      ->check(CLI::IsMember({"line", "blank-line"}));
  encode->add_option("--max-len", max_len);
  encode->add_flag("--wrap,!--no-wrap", wrap, "add CLS/SEP and truncate");
  auto* ids_flag = encode->add_flag("--ids", print_ids, "print ids");
  encode->add_flag("--tokens", "print token texts (default)")
      ->excludes(ids_flag);

  auto* decode = app.add_subcommand("decode", "decode token lines");
  decode->add_option("--model", model_dir)->required();
  decode->add_option("--input", input_path)->required();

  std::string report = "all";
  bool as_json = false;
  auto* stats = app.add_subcommand("stats", "corpus diagnostics");
  stats->add_option("--model", model_dir)->required();
  stats->add_option("--input", input_path)->required();
  stats->add_option("--format", corpus_format)
      ->check(CLI::IsMember({"line", "blank-line"}));
  stats->add_option("--report", report)
      ->check(CLI::IsMember({"unk", "fertility", "all"}));
  stats->add_flag("--json", as_json);

  std::vector<std::string> model_dirs;
  std::string sentence;
  auto* cmp = app.add_subcommand("compare", "side-by-side tokenization");
  cmp->add_option("--models", model_dirs)->required()->expected(-1);
  cmp->add_option("--sentence", sentence)->required();

  std::uint64_t total_params = 0, core_params = 0, hidden = 0;
  double ratio = 0.0;
  auto* budget = app.add_subcommand("budget", "vocabulary-size arithmetic");
  auto* total_opt = budget->add_option("--total-params", total_params);
  auto* core_opt = budget->add_option("--core-params", core_params);
  total_opt->excludes(core_opt);
  budget->add_option("--ratio", ratio)->required();
  budget->add_option("--hidden", hidden)->required();

  std::uint32_t gpus = 0;
  double hours = 0.0, watts = 250.0, factor = -1.0, scc_rate = -1.0;
  auto* energy = app.add_subcommand("energy", "GPU energy accounting");
  energy->add_option("--gpus", gpus)->required();
  energy->add_option("--hours", hours)->required();
  energy->add_option("--watts", watts);
  energy->add_option("--factor", factor, "kg CO2 per kWh");
  energy->add_option("--scc-rate", scc_rate, "USD per ton CO2");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*train) return run_train(train_opt);

    if (*encode) {
      auto model = granul::load_model(model_dir);
      auto docs = granul::ingest(input_path,
                                 granul::corpus_format_from_string(
                                     corpus_format));
      for (const auto& doc : docs) {
        granul::Encoding enc = model->encode_document(doc.text);
        if (wrap) enc = granul::assemble_sequence(enc, model->vocab(), max_len);
        std::ostringstream line;
        if (print_ids) {
          for (std::size_t i = 0; i < enc.ids.size(); ++i)
            line << (i ? " " : "") << enc.ids[i];
        } else {
          for (std::size_t i = 0; i < enc.tokens.size(); ++i)
            line << (i ? " " : "") << enc.tokens[i];
        }
        std::cout << line.str() << "\n";
      }
      return 0;
    }

    if (*decode) {
      auto model = granul::load_model(model_dir);
      std::ifstream in(input_path, std::ios::binary);
      if (!in) throw granul::error("cannot read " + input_path);
      std::string line;
      while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::cout << granul::decode_tokens(*model, split_tokens(line)) << "\n";
      }
      return 0;
    }

    if (*stats) {
      auto model = granul::load_model(model_dir);
      auto docs = granul::ingest(input_path,
                                 granul::corpus_format_from_string(
                                     corpus_format));
      granul::CorpusStats s = granul::compute_stats(*model, docs);
      if (as_json) {
        std::cout << granul::stats_json(s).dump(2) << "\n";
      } else if (report == "unk") {
        std::cout << "unk_count " << s.unk_count << "\n"
                  << "token_count " << s.token_count << "\n"
                  << "unk_ratio " << std::fixed << std::setprecision(6)
                  << s.unk_ratio << "\n";
      } else if (report == "fertility") {
        std::cout << "fertility " << std::fixed << std::setprecision(6)
                  << s.fertility << "\n";
      } else {
        std::cout << granul::stats_text(s);
      }
      return 0;
    }

    if (*cmp) {
      std::vector<std::unique_ptr<granul::Tokenizer>> models;
      std::vector<const granul::Tokenizer*> refs;
      for (const auto& dir : model_dirs) {
        models.push_back(granul::load_model(dir));
        refs.push_back(models.back().get());
      }
      std::cout << granul::comparison_table(granul::compare(refs, sentence));
      return 0;
    }

    if (*budget) {
      if (!*total_opt && !*core_opt) {
        std::cerr << "granul: one of --total-params or --core-params is "
                     "required\n";
        return kExitUsage;
      }
      std::uint64_t v = *total_opt
                            ? granul::vocab_size_total(total_params, ratio,
                                                       hidden)
                            : granul::vocab_size_fixed_core(core_params, ratio,
                                                            hidden);
      std::cout << v << " (" << granul::format_k(v) << ")\n";
      return 0;
    }

    if (*energy) {
      granul::EnergyReport report_ = granul::energy(gpus, hours, watts);
      std::cout << format_kwh(report_.kwh) << " kWh\n";
      if (factor >= 0.0) {
        double kg = granul::ghg(report_.kwh, factor);
        std::cout << format_kwh(kg) << " kg CO2\n";
        if (scc_rate >= 0.0)
          std::cout << "$" << format_kwh(granul::scc(kg, scc_rate)) << "\n";
      }
      return 0;
    }
  } catch (const granul::invalid_argument_error& e) {
    std::cerr << "granul: " << e.what() << "\n";
    return kExitUsage;
  } catch (const granul::error& e) {
    std::cerr << "granul: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "granul: " << e.what() << "\n";
    return kExitData;
  }
  return 0;
}
