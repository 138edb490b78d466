#include <algorithm>
#include <iterator>
#include <string_view>

#include "cdlsi/corpus.hpp"

namespace cdlsi::corpus {

namespace {

// Version 1. Sorted; changing it changes every weight downstream.
constexpr std::string_view kStopwords[] = {
    "a", "about", "above", "after", "again", "against", "all", "also", "am", "an", "and",
    "any", "are", "aren", "as", "at", "be", "because", "been", "before", "being", "below",
    "between", "both", "but", "by", "can", "cannot", "could", "couldn", "did", "didn", "do",
    "does", "doesn", "doing", "don", "down", "during", "each", "either", "else", "etc", "ever",
    "every", "few", "for", "from", "further", "had", "hadn", "has", "hasn", "have", "haven",
    "having", "he", "her", "here", "hers", "herself", "him", "himself", "his", "how",
    "however", "i", "if", "in", "into", "is", "isn", "it", "its", "itself", "just", "least",
    "less", "let", "ll", "may", "me", "might", "more", "most", "mr", "mrs", "ms", "must",
    "mustn", "my", "myself", "neither", "no", "nor", "not", "now", "of", "off", "often", "on",
    "once", "only", "or", "other", "ought", "our", "ours", "ourselves", "out", "over", "own",
    "per", "quite", "rather", "re", "same", "shall", "shan", "she", "should", "shouldn",
    "since", "so", "some", "such", "than", "that", "the", "their", "theirs", "them",
    "themselves", "then", "there", "these", "they", "this", "those", "though", "through",
    "thus", "to", "too", "under", "until", "up", "upon", "us", "ve", "very", "via", "was",
    "wasn", "we", "were", "weren", "what", "when", "where", "whether", "which", "while", "who",
    "whom", "whose", "why", "will", "with", "within", "without", "won", "would", "wouldn",
    "yes", "yet", "you", "your", "yours", "yourself", "yourselves",
};

static_assert(std::is_sorted(std::begin(kStopwords), std::end(kStopwords)));

}  // namespace

std::span<const std::string_view> stopwords() noexcept { return kStopwords; }

bool is_stopword(std::string_view term) noexcept {
  return std::binary_search(std::begin(kStopwords), std::end(kStopwords), term);
}

}  // namespace cdlsi::corpus
