#include <catch_amalgamated.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>

#include "granul/corpus.hpp"

using namespace granul;

namespace {

std::filesystem::path write_temp(const std::string& name,
                                 const std::string& body) {
  auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream out(path, std::ios::binary);
  out << body;
  return path;
}

}  // namespace

TEST_CASE("line format yields one document per non-empty line") {
  auto path = write_temp("granul_corpus_lines.txt", "bir\niki\nüç\n");
  auto docs = ingest(path.string(), CorpusFormat::line);
  REQUIRE(docs.size() == 3);
  CHECK(docs[0].text == "bir");
  CHECK(docs[1].text == "iki");
  CHECK(docs[2].text == "üç");
  CHECK(docs[2].id == 2);
  std::filesystem::remove(path);
}

TEST_CASE("blank-line format groups lines") {
  auto path = write_temp("granul_corpus_blank.txt", "a\n\nb\nc\n");
  auto docs = ingest(path.string(), CorpusFormat::blank_line);
  REQUIRE(docs.size() == 2);
  CHECK(docs[0].text == "a");
  CHECK(docs[1].text == "b\nc");
  std::filesystem::remove(path);
}

TEST_CASE("empty file yields empty stream") {
  auto path = write_temp("granul_corpus_empty.txt", "");
  CHECK(ingest(path.string(), CorpusFormat::line).empty());
  CHECK(ingest(path.string(), CorpusFormat::blank_line).empty());
  std::filesystem::remove(path);
}

TEST_CASE("ingest rejects invalid UTF-8 with byte offset") {
  auto path = write_temp("granul_corpus_bad.txt", "ok\nab\xff\n");
  try {
    ingest(path.string(), CorpusFormat::line);
    FAIL("expected malformed_input_error");
  } catch (const malformed_input_error& e) {
    CHECK(e.byte_offset() == 5);
  }
  std::filesystem::remove(path);
}

TEST_CASE("filter_documents keeps order and counts drops") {
  std::vector<Document> docs;
  for (std::size_t i = 0; i < 5; ++i) docs.push_back({i, "doc"});

  auto all = filter_documents(docs, keep_all_filter());
  CHECK(all.kept.size() == 5);
  CHECK(all.dropped == 0);

  DocumentFilter drop_all{[](const Document&) { return false; }, "drop"};
  auto none = filter_documents(docs, drop_all);
  CHECK(none.kept.empty());
  CHECK(none.dropped == 5);
}

TEST_CASE("turkish heuristic matches hand labeling") {
  // Hand-labeled: first five Turkish (kept), last five not.
  std::vector<std::pair<std::string, bool>> fixture = {
      {"toplumsal barış sağlanır", true},
      {"güneşin tadını çıkarabildiler", true},
      {"bugün hava çok güzel", true},
      {"ağaçlar yeşil çiçekler açtı", true},
      {"şu anda istanbul'dayız", true},
      {"the quick brown fox jumps", false},
      {"zwölf boxkämpfer jagen viktor quer", false},
      {"qqq www xxx", false},
      {"12345 67890", false},
      {"", false},
  };
  auto filter = turkish_heuristic_filter();
  std::vector<Document> docs;
  for (std::size_t i = 0; i < fixture.size(); ++i)
    docs.push_back({i, fixture[i].first});
  auto result = filter_documents(docs, filter);
  std::size_t expected_kept =
      std::count_if(fixture.begin(), fixture.end(),
                    [](const auto& f) { return f.second; });
  CHECK(result.kept.size() == expected_kept);
  CHECK(result.dropped == fixture.size() - expected_kept);
  for (std::size_t i = 0; i < result.kept.size(); ++i)
    CHECK(fixture[result.kept[i].id].second);
}

TEST_CASE("count_words aggregates normalized words") {
  std::vector<Document> docs = {{0, "ab ab"}, {1, "ab"}};
  WordCounts counts = count_words(docs);
  CHECK(counts.counts.at("ab") == 3);
  CHECK(counts.total_words == 3);

  CHECK(count_words({}).total_words == 0);

  std::vector<Document> table1 = {{0, "Toplumsal barış sağlanır"},
                                  {1, "Toplumsal barış sağlanır"}};
  WordCounts twice = count_words(table1);
  CHECK(twice.counts.at("toplumsal") == 2);
  CHECK(twice.counts.at("barış") == 2);
  CHECK(twice.counts.at("sağlanır") == 2);
  CHECK(twice.total_words == 6);
}

TEST_CASE("count_words is order invariant and thread invariant") {
  std::mt19937 rng(7);
  std::vector<Document> docs;
  const char* words[] = {"bir", "iki", "üç", "dört", "beş"};
  for (std::size_t i = 0; i < 200; ++i) {
    std::string text;
    for (int j = 0; j < 5; ++j) {
      if (j) text += ' ';
      text += words[rng() % 5];
    }
    docs.push_back({i, text});
  }
  WordCounts sequential = count_words(docs, {}, 1);
  WordCounts parallel = count_words(docs, {}, 8);
  CHECK(sequential.counts == parallel.counts);
  CHECK(sequential.total_words == parallel.total_words);

  std::shuffle(docs.begin(), docs.end(), rng);
  WordCounts shuffled = count_words(docs, {}, 4);
  CHECK(shuffled.counts == sequential.counts);
}

TEST_CASE("word counts TSV round-trips sorted") {
  WordCounts counts;
  counts.add("barış", 3);
  counts.add("ve", 7);
  counts.add("ama", 3);

  auto path = std::filesystem::temp_directory_path() / "granul_counts.tsv";
  word_counts_save(counts, path.string());

  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  CHECK(line == "ve\t7");
  std::getline(in, line);
  CHECK(line == "ama\t3");  // tie broken lexicographically
  std::getline(in, line);
  CHECK(line == "barış\t3");

  WordCounts loaded = word_counts_load(path.string());
  CHECK(loaded.counts == counts.counts);
  CHECK(loaded.total_words == counts.total_words);
  std::filesystem::remove(path);
}
