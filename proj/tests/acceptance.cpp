// Acceptance gate: one self-checking scenario per release criterion,
// printed as a pass/fail line with its runtime. Exits nonzero when any
// scenario fails.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "granul/analytics.hpp"
#include "granul/budget.hpp"
#include "granul/decode.hpp"
#include "granul/granul.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace granul;

namespace {

struct Failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void expect(bool ok, const std::string& what) {
  if (!ok) throw Failure(what);
}

template <typename A, typename B>
void expect_eq(const A& got, const B& want, const std::string& what) {
  if (!(got == want)) {
    std::ostringstream msg;
    msg << what << " (got " << got << ", want " << want << ")";
    throw Failure(msg.str());
  }
}

std::string random_word(std::mt19937& rng, std::size_t max_len) {
  static const std::vector<std::string> alphabet = {
      "a", "b", "c", "d", "e", "ş", "ğ", "ü", "ı"};
  std::uniform_int_distribution<std::size_t> len(1, max_len);
  std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
  std::string word;
  for (std::size_t i = 0, n = len(rng); i < n; ++i) word += alphabet[pick(rng)];
  return word;
}

WordCounts random_counts(std::mt19937& rng) {
  std::uniform_int_distribution<std::size_t> words(1, 20);
  std::uniform_int_distribution<std::uint64_t> freq(1, 9);
  WordCounts counts;
  for (std::size_t i = 0, n = words(rng); i < n; ++i)
    counts.add(random_word(rng, 8), freq(rng));
  return counts;
}

std::string random_utf8(std::mt19937& rng) {
  static const std::vector<std::string> pieces = {
      "a", "z", "ş", "ğ", "ü", "İ", "I", "s", " ", ".", ",", "1",
      "\xc3\xa7", "\xe2\x82\xac", "\xf0\x9f\x99\x82", "A\xcc\x87"};
  std::uniform_int_distribution<std::size_t> len(0, 40);
  std::uniform_int_distribution<std::size_t> pick(0, pieces.size() - 1);
  std::string out;
  for (std::size_t i = 0, n = len(rng); i < n; ++i) out += pieces[pick(rng)];
  return out;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  expect(bool(in), "cannot read " + path.string());
  std::ostringstream body;
  body << in.rdbuf();
  return body.str();
}

void write_file(const fs::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  out << body;
}

bool same_directory_bytes(const fs::path& a, const fs::path& b) {
  std::vector<std::string> names_a, names_b;
  for (const auto& e : fs::directory_iterator(a))
    names_a.push_back(e.path().filename().string());
  for (const auto& e : fs::directory_iterator(b))
    names_b.push_back(e.path().filename().string());
  std::sort(names_a.begin(), names_a.end());
  std::sort(names_b.begin(), names_b.end());
  if (names_a != names_b) return false;
  for (const auto& name : names_a)
    if (read_file(a / name) != read_file(b / name)) return false;
  return true;
}

// 1. The embedding-budget formula reproduces the published 16,675-token
// vocabulary and its "16k" display form.
void criterion_budget_anchor() {
  expect_eq(vocab_size_total(42'690'000, 0.20, 512), std::uint64_t{16'675},
            "anchor vocabulary size");
  expect_eq(format_k(16'675), std::string("16k"), "anchor display form");
}

// 2. The fixed-core sweep formats to the published column headers.
void criterion_ratio_sweep() {
  const std::uint64_t core = 42'690'000 - 16'675 * 512;
  const double ratios[] = {0.1, 0.2, 0.3, 0.4, 0.5};
  const char* headers[] = {"7k", "16k", "28k", "44k", "66k"};
  for (int i = 0; i < 5; ++i)
    expect_eq(format_k(vocab_size_fixed_core(core, ratios[i], 512)),
              std::string(headers[i]), "sweep header");
}

// 3. Energy accounting reproduces both published cost tables.
void criterion_energy_tables() {
  auto close = [](double got, double want, double tol) {
    return got >= want - tol && got <= want + tol;
  };
  const double exact[][2] = {{2 * 36.3, 18.15}, {2 * 40, 20.00},
                             {2 * 44, 22.00},   {2 * 52.5, 26.25},
                             {2 * 57.75, 28.875}};
  for (auto [gpu_hours, want] : exact)
    expect(close(energy(1, gpu_hours, 250).kwh, want, 1e-9),
           "pretraining kWh");
  expect(close(energy(2, 1.77, 250).kwh, 0.89, 0.005), "fine-tune kWh 0.89");
  expect(close(energy(2, 6.08, 250).kwh, 3.04, 1e-9), "fine-tune kWh 3.04");
  expect(close(energy(2, 2.50, 250).kwh, 1.25, 1e-9), "fine-tune kWh 1.25");
  expect(close(energy(1, 8.33, 250).kwh, 2.08, 0.005), "fine-tune kWh 2.08");
  expect(close(energy(2, 2.05, 250).kwh, 1.03, 0.0051), "fine-tune kWh 1.03");
  expect(close(energy(2, 35.0, 250).kwh, 17.5, 1e-9), "fine-tune kWh 17.5");
}

// 4. The incremental BPE trainer and encoder agree with exhaustive
// recount / rank-sweep reference implementations on random corpora.
void criterion_bpe_oracle() {
  std::mt19937 rng(4242);
  std::uniform_int_distribution<std::size_t> size(261, 350);
  for (int trial = 0; trial < 100; ++trial) {
    WordCounts counts = random_counts(rng);
    std::size_t vocab_size = size(rng);
    SubwordTokenizer model = train_bpe(counts, vocab_size);
    auto expected = oracle::train_bpe_merges(counts, vocab_size);
    expect(model.merges().pairs == expected, "merge sequence mismatch");
    for (const auto& [word, freq] : counts.counts) {
      (void)freq;
      expect(model.encode_word(word) ==
                 oracle::encode_bpe_by_rank(expected, word),
             "encoding mismatch for \"" + word + "\"");
    }
    std::string probe = random_word(rng, 8);
    expect(model.encode_word(probe) ==
               oracle::encode_bpe_by_rank(expected, probe),
           "encoding mismatch for probe \"" + probe + "\"");
  }
}

// 5. WordPiece scoring picks ("a","##b") where plain pair frequency
// would pick the c+d merge, and greedy encoding matches a scan-all
// longest-match reference.
void criterion_wordpiece() {
  WordCounts fixture;
  fixture.add("ab", 2);
  fixture.add("cd", 3);
  fixture.add("ad", 1);
  auto wp = oracle::train_wordpiece_merges(fixture, 5 + 6 + 1);
  expect(!wp.empty() && wp.front() == oracle::Pair{"a", "##b"},
         "first wordpiece merge");
  auto bpe = oracle::train_bpe_merges(fixture, 262);
  expect(!bpe.empty() && bpe.front() == oracle::Pair{"c", "d"},
         "first frequency merge");
  SubwordTokenizer model = train_wordpiece(fixture, 5 + 6 + 1);
  expect(model.merges().pairs == wp, "trainer first merge");

  std::mt19937 rng(555);
  std::uniform_int_distribution<std::size_t> headroom(0, 25);
  for (int trial = 0; trial < 100; ++trial) {
    WordCounts counts = random_counts(rng);
    // The target must cover specials plus the corpus' base alphabet.
    std::set<std::string> base;
    for (const auto& [word, freq] : counts.counts) {
      (void)freq;
      auto chars = utf8_chars(word);
      for (std::size_t i = 0; i < chars.size(); ++i)
        base.insert(i == 0 ? chars[i] : "##" + chars[i]);
    }
    SubwordTokenizer trained =
        train_wordpiece(counts, 5 + base.size() + headroom(rng));
    for (int probe = 0; probe < 5; ++probe) {
      std::string word = random_word(rng, 8);
      expect(trained.encode_word(word) ==
                 oracle::encode_wordpiece_greedy(trained.vocab(), word),
             "greedy encoding mismatch for \"" + word + "\"");
    }
  }
}

// 6. Unknown-token guarantees: bytes and BPE never emit UNK; a
// word-level model covers its own training corpus; the sample sentence
// with vocabulary {"barış"} reproduces the published row.
void criterion_unk_properties() {
  ByteTokenizer bytes;
  WordCounts bpe_counts;
  std::mt19937 rng(99);
  std::vector<std::string> fuzz;
  for (int i = 0; i < 1000; ++i) fuzz.push_back(random_utf8(rng));
  for (const auto& text : fuzz)
    for (const auto& word : pre_tokenize(normalize(text)))
      bpe_counts.add(word);
  SubwordTokenizer bpe = train_bpe(bpe_counts, 300);
  for (const auto& text : fuzz) {
    for (int id : bytes.encode_bytes(text).ids)
      expect(id != SpecialTokens::unk_id, "byte UNK");
    for (int id : bpe.encode_document(text).ids)
      expect(id != SpecialTokens::unk_id, "bpe UNK");
  }

  std::vector<Document> docs = {{0, "bir iki üç"}, {1, "bir dört"}};
  WordCounts counts = count_words(docs);
  LexicalTokenizer word = train_wordlevel(counts, 5 + counts.counts.size());
  CorpusStats stats = compute_stats(word, docs);
  expect_eq(stats.unk_ratio, 0.0, "word-level self-coverage UNK ratio");

  WordCounts tiny;
  tiny.add("barış");
  LexicalTokenizer sample = train_wordlevel(tiny, 6);
  Encoding enc = assemble_sequence(
      sample.encode_document("Toplumsal barış sağlanır"), sample.vocab(), 514);
  std::vector<std::string> want = {"[CLS]", "[UNK]", "barış", "[UNK]",
                                   "[SEP]"};
  expect(enc.tokens == want, "sample word-level row");
}

// 7. Reversibility: byte and BPE decoding invert encoding, and the
// vocabulary / merges files survive a save-load-save cycle unchanged.
void criterion_round_trips() {
  ByteTokenizer bytes;
  std::mt19937 rng(777);
  for (int i = 0; i < 1000; ++i) {
    std::string text = random_utf8(rng);
    expect_eq(bytes.decode_bytes(bytes.encode_bytes(text)), normalize(text),
              "byte round-trip");
  }

  WordCounts counts;
  std::vector<std::string> sentences;
  for (int i = 0; i < 1000; ++i) {
    std::uniform_int_distribution<std::size_t> words(1, 6);
    std::string sentence;
    for (std::size_t w = 0, n = words(rng); w < n; ++w) {
      if (w) sentence += ' ';
      sentence += random_word(rng, 8);
    }
    sentences.push_back(sentence);
    for (const auto& word : pre_tokenize(sentence)) counts.add(word);
  }
  SubwordTokenizer bpe = train_bpe(counts, 320);
  for (const auto& sentence : sentences)
    expect_eq(bpe.decode(bpe.encode_document(sentence).tokens), sentence,
              "bpe round-trip");

  fs::path dir = fs::temp_directory_path() / "granul_acceptance_files";
  fs::remove_all(dir);
  fs::create_directories(dir);
  vocab_save(bpe.vocab(), (dir / "vocab.txt").string());
  vocab_save(vocab_load((dir / "vocab.txt").string()),
             (dir / "vocab2.txt").string());
  expect(read_file(dir / "vocab.txt") == read_file(dir / "vocab2.txt"),
         "vocab file byte identity");
  merges_save(bpe.merges(), (dir / "merges.txt").string());
  merges_save(merges_load((dir / "merges.txt").string()),
              (dir / "merges2.txt").string());
  expect(read_file(dir / "merges.txt") == read_file(dir / "merges2.txt"),
         "merges file byte identity");
  fs::remove_all(dir);
}

// 8. Normalization: idempotent, NFC-valid, and locale-correct on the
// dotted/dotless i pair.
void criterion_normalization() {
  expect_eq(normalize("İstanbul"), std::string("istanbul"), "İ lowering");
  expect_eq(normalize("ISPARTA"), std::string("ısparta"), "I lowering");
  std::mt19937 rng(313);
  for (int i = 0; i < 1000; ++i) {
    std::string once = normalize(random_utf8(rng));
    expect_eq(normalize(once), once, "idempotence");
    expect(is_nfc(once), "NFC validity");
  }
}

// 9. Morphological fixtures: loader validation, the published
// segmentation of "güneşin", and 2.75 units per word on the sample
// sentence.
void criterion_morphology() {
  fs::path dir = fs::temp_directory_path() / "granul_acceptance_lex";
  fs::remove_all(dir);
  fs::create_directories(dir);
  write_file(dir / "bad.tsv", "evin\tev ##de\n");
  bool rejected = false;
  try {
    lexicon_load((dir / "bad.tsv").string());
  } catch (const format_error&) {
    rejected = true;
  }
  expect(rejected, "loader accepts concatenation violation");

  write_file(dir / "lexicon.tsv",
             "güneşin\tgüneş ##in\n"
             "tadını\ttad ##ın ##ı\n"
             "çıkarabildiler\tçık ##ar ##abil ##di ##ler\n");
  SegmentationLexicon lexicon = lexicon_load((dir / "lexicon.tsv").string());
  std::vector<std::string> want = {"güneş", "##in"};
  expect(lexicon.segment("güneşin") == want, "güneşin segmentation");

  WordCounts counts;
  for (const char* w :
       {"istanbullular", "güneşin", "tadını", "çıkarabildiler"})
    counts.add(w);
  LexicalTokenizer morph = train_morph(counts, lexicon, 50);
  CorpusStats stats = compute_stats(
      morph, {{0, "İstanbullular güneşin tadını çıkarabildiler"}});
  expect_eq(stats.fertility, 2.75, "sample-sentence fertility");
  fs::remove_all(dir);
}

// 10. Determinism: the command-line trainer produces byte-identical
// model directories across repeat runs and thread counts, for every
// method.
void criterion_determinism() {
  fs::path dir = fs::temp_directory_path() / "granul_acceptance_cli";
  fs::remove_all(dir);
  fs::create_directories(dir);
  write_file(dir / "corpus.txt",
             "güneşin tadını çıkarabildiler\n"
             "güneşin tadını unutma unutma\n"
             "toplumsal barış sağlanır\n"
             "barış ve güneş her yerde\n");
  write_file(dir / "lexicon.tsv",
             "güneşin\tgüneş ##in\n"
             "tadını\ttad ##ın ##ı\n");

  struct Run {
    const char* method;
    std::string extra;
  };
  const std::string corpus = (dir / "corpus.txt").string();
  const std::vector<Run> runs = {
      {"char", ""},
      {"bpe", " --vocab-size 300"},
      {"wordpiece", " --vocab-size 60"},
      {"word", " --vocab-size 20"},
      {"morph", " --vocab-size 20 --lexicon " + (dir / "lexicon.tsv").string()},
  };
  for (const auto& run : runs) {
    for (const char* threads : {"1", "8"}) {
      std::string out =
          (dir / (std::string(run.method) + "_t" + threads)).string();
      std::string cmd = std::string("GRANUL_THREADS=") + threads + " " +
                        GRANUL_CLI_PATH + " train --method " + run.method +
                        " --input " + corpus + run.extra + " --out " + out +
                        " >/dev/null 2>&1";
      expect(std::system(cmd.c_str()) == 0,
             std::string("training failed for ") + run.method);
    }
    expect(same_directory_bytes(
               dir / (std::string(run.method) + "_t1"),
               dir / (std::string(run.method) + "_t8")),
           std::string("model directories differ for ") + run.method);
  }
  fs::remove_all(dir);
}

struct Criterion {
  const char* name;
  std::function<void()> run;
  double budget_ms;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {"budget anchor 16675/16k", criterion_budget_anchor, 1},
      {"ratio sweep headers", criterion_ratio_sweep, 1},
      {"energy cost tables", criterion_energy_tables, 1},
      {"bpe trainer/encoder oracle equivalence", criterion_bpe_oracle, 10'000},
      {"wordpiece scoring and greedy oracle", criterion_wordpiece, 5'000},
      {"unknown-token guarantees", criterion_unk_properties, 10'000},
      {"encode/decode and file round-trips", criterion_round_trips, 10'000},
      {"normalization idempotence and casing", criterion_normalization, 5'000},
      {"morphological lexicon fixtures", criterion_morphology, 1'000},
      {"deterministic training across thread counts", criterion_determinism,
       30'000},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto& c = criteria[i];
    auto start = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = true;
    try {
      c.run();
    } catch (const std::exception& e) {
      ok = false;
      detail = e.what();
    }
    double ms = std::chrono::duration<double, std::milli>(
                    std::chrono::steady_clock::now() - start)
                    .count();
    if (ok && ms > c.budget_ms) {
      ok = false;
      detail = "exceeded time budget";
    }
    std::printf("criterion %2zu [%s] %s (%.1f ms)%s%s\n", i + 1,
                ok ? "PASS" : "FAIL", c.name, ms, detail.empty() ? "" : ": ",
                detail.c_str());
    if (!ok) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
