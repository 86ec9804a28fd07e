#ifndef REIFKB_DATASET_H_
#define REIFKB_DATASET_H_

#include <filesystem>
#include <string>
#include <vector>

#include "reifkb/kb.h"
#include "reifkb/models.h"

namespace reifkb {

// Example files: JSON lines {"tokens": [...], "seeds": [...], "answers":
// [...], "hops": n} with token ids into vocab.txt and entity indices.
void WriteExamples(const std::vector<Example>& examples, const std::filesystem::path& path);
// ConfigError on a missing file or malformed line (with its line number).
std::vector<Example> ReadExamples(const std::filesystem::path& path);

// One token per line; line i is token id i.
void WriteVocab(const std::vector<std::string>& vocab, const std::filesystem::path& path);
std::vector<std::string> ReadVocab(const std::filesystem::path& path);

// A KB completion query: {"rel": name, "head": name, "tails": [names]}.
struct KbcQuery {
  std::string rel;
  std::string head;
  std::vector<std::string> tails;
  bool operator==(const KbcQuery&) const = default;
};
void WriteKbcQueries(const std::vector<KbcQuery>& queries, const std::filesystem::path& path);
std::vector<KbcQuery> ReadKbcQueries(const std::filesystem::path& path);

// Resolves names against a single-type KB: tokens = {rel}, seeds = {head},
// answers = tails. LookupError on unknown names.
std::vector<Example> KbcExamples(const KnowledgeBase& kb, const std::vector<KbcQuery>& queries);

// Lowercase hex FNV-1a digest of a file's bytes.
std::string FileDigest(const std::filesystem::path& path);

// Truncates and rewrites `path`, creating parent directories.
void WriteTextFile(const std::filesystem::path& path, const std::string& text);
std::string ReadTextFile(const std::filesystem::path& path);

}  // namespace reifkb

#endif  // REIFKB_DATASET_H_
