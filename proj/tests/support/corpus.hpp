#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace testsupport {

struct CorpusReport {
  std::string id;
  std::string text;
};

/// Reports that carry all four tags and offer a site for every error class.
std::vector<CorpusReport> all_tags_corpus(std::size_t n, std::uint64_t seed);

/// Every block of four reports holds {device, severity}, {device}, {} and {},
/// so f(device) = 0.5 and f(severity) = 0.25.
std::vector<CorpusReport> two_tag_corpus(std::size_t n);

/// Reports with no tag at all.
std::vector<CorpusReport> untagged_corpus(std::size_t n, std::uint64_t seed);

}  // namespace testsupport
