#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "errsynth/dataset.hpp"
#include "errsynth/error_class.hpp"

namespace errsynth {

/// Share of one split's reports that carry each error class.
struct SplitDistribution {
  Split split = Split::Train;
  std::size_t reports = 0;
  std::array<std::size_t, 12> counts{};  // indexed like kInjectableClasses

  std::size_t count(ErrorClass c) const;
  /// 100 * count / reports.
  double percent(ErrorClass c) const;
};

struct DistributionReport {
  std::vector<SplitDistribution> splits;  // train, dev, test order; empty splits left out

  const SplitDistribution* find(Split s) const;
  /// Rows grouped by category, one column per split, two decimals.
  std::string render_table() const;
  /// category,error_class,<split>... with a trailing reports row.
  std::string render_csv() const;
};

/// Counts, per class, the reports whose plan includes it.
/// Throws Error(EmptySplit) when no record belongs to `split`.
SplitDistribution compute_distribution(std::span<const ReportRecord> records, Split split);

/// Every split that has records. Throws Error(EmptySplit) when `records` is empty.
DistributionReport compute_distribution(std::span<const ReportRecord> records);

/// Same statistic read off labeled sentence rows: a report carries a class
/// when one of its rows has label 1 with that class. Rows are grouped by
/// report_id; `split` only names the result.
/// Throws Error(EmptySplit) when `rows` is empty.
SplitDistribution distribution_from_sentences(std::span<const SentenceDatasetRow> rows, Split split = Split::Train);

/// "%.2f".
std::string format_percent(double v);

}  // namespace errsynth
