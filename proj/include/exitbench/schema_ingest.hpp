// Copyright 2026 The exitbench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "exitbench/date.hpp"

namespace exitbench {

enum class TableKind { kOrganizations, kFundingRounds, kInvestments, kIpos, kAcquisitions, kJobs };

inline constexpr std::array<TableKind, 6> kAllTableKinds = {
    TableKind::kOrganizations, TableKind::kFundingRounds, TableKind::kInvestments,
    TableKind::kIpos,          TableKind::kAcquisitions,  TableKind::kJobs};

// `organizations`, `funding_rounds`, ... Also the CSV file stem.
std::string_view table_name(TableKind kind);
TableKind table_kind_from_name(std::string_view name);

// Logical column names a table kind reads, in canonical order.
std::span<const std::string_view> logical_columns(TableKind kind);

struct OrganizationRow {
  std::string org_id;
  std::string name;
  std::string description;
  std::optional<Date> founded_on;
  std::optional<Date> created_at;
  friend bool operator==(const OrganizationRow&, const OrganizationRow&) = default;
};

struct FundingRoundRow {
  std::string round_id;
  std::string org_id;
  std::optional<Date> announced_on;
  std::optional<double> raised_usd;
  friend bool operator==(const FundingRoundRow&, const FundingRoundRow&) = default;
};

struct InvestmentRow {
  std::string round_id;
  std::string investor_id;
  friend bool operator==(const InvestmentRow&, const InvestmentRow&) = default;
};

struct IpoRow {
  std::string org_id;
  std::optional<Date> went_public_on;
  friend bool operator==(const IpoRow&, const IpoRow&) = default;
};

struct AcquisitionRow {
  std::string acquiree_id;
  std::string acquirer_id;
  std::optional<Date> announced_on;
  friend bool operator==(const AcquisitionRow&, const AcquisitionRow&) = default;
};

struct JobRow {
  std::string org_id;
  std::string person_id;
  std::string title;
  friend bool operator==(const JobRow&, const JobRow&) = default;
};

struct RowError {
  std::size_t line = 0;
  std::string reason;
};

// Logical-to-physical column names for every table kind. Missing entries
// fall back to the logical name.
class ColumnMapping {
 public:
  // The shipped Crunchbase-style defaults (`uuid`, `raised_amount_usd`, ...).
  static ColumnMapping crunchbase_defaults();
  // Every logical name maps to itself; the format the pipeline writes.
  static ColumnMapping identity();

  // Flat `table.logical = physical` lines; `#` starts a comment. Entries
  // override the Crunchbase defaults.
  static ColumnMapping parse(std::string_view text);
  static ColumnMapping load(const std::filesystem::path& path);

  std::string physical(TableKind kind, std::string_view logical) const;
  void set(TableKind kind, std::string_view logical, std::string physical);

  std::string to_text() const;

 private:
  std::map<std::pair<TableKind, std::string>, std::string> columns_;
};

template <typename Row>
struct LoadResult {
  std::vector<Row> rows;
  std::vector<RowError> errors;
};

struct LoadOptions {
  // Promote the first row error to a fatal DataError.
  bool strict = false;
};

LoadResult<OrganizationRow> load_organizations(const std::filesystem::path& path,
                                               const ColumnMapping& mapping,
                                               const LoadOptions& options = {});
LoadResult<FundingRoundRow> load_funding_rounds(const std::filesystem::path& path,
                                                const ColumnMapping& mapping,
                                                const LoadOptions& options = {});
LoadResult<InvestmentRow> load_investments(const std::filesystem::path& path,
                                           const ColumnMapping& mapping,
                                           const LoadOptions& options = {});
LoadResult<IpoRow> load_ipos(const std::filesystem::path& path, const ColumnMapping& mapping,
                             const LoadOptions& options = {});
LoadResult<AcquisitionRow> load_acquisitions(const std::filesystem::path& path,
                                             const ColumnMapping& mapping,
                                             const LoadOptions& options = {});
LoadResult<JobRow> load_jobs(const std::filesystem::path& path, const ColumnMapping& mapping,
                             const LoadOptions& options = {});

struct Tables {
  std::vector<OrganizationRow> organizations;
  std::vector<FundingRoundRow> funding_rounds;
  std::vector<InvestmentRow> investments;
  std::vector<IpoRow> ipos;
  std::vector<AcquisitionRow> acquisitions;
  std::vector<JobRow> jobs;
};

struct TablesLoad {
  Tables tables;
  std::map<TableKind, std::vector<RowError>> errors;
  std::size_t error_count() const;
};

// Loads `<dir>/<table_name>.csv` for all six kinds, concurrently.
TablesLoad load_tables(const std::filesystem::path& dir, const ColumnMapping& mapping,
                       const LoadOptions& options = {});

// Writes the rows as CSV with a header taken from `mapping`.
void write_table(const std::filesystem::path& path, const Tables& tables, TableKind kind,
                 const ColumnMapping& mapping);
void write_tables(const std::filesystem::path& dir, const Tables& tables,
                  const ColumnMapping& mapping);

// Dangling foreign keys found while indexing.
struct IntegritySummary {
  struct Issue {
    std::size_t count = 0;
    std::vector<std::string> samples;  // first few offending keys
  };
  std::map<std::string, Issue> issues;  // keyed by check name

  std::size_t total() const;
  std::size_t count(std::string_view check) const;
  nlohmann::json to_json() const;
};

// Immutable after construction; safe for concurrent reads.
class CompanyStore {
 public:
  CompanyStore() = default;
  explicit CompanyStore(Tables tables);

  const Tables& tables() const noexcept { return tables_; }
  const IntegritySummary& integrity() const noexcept { return integrity_; }

  const OrganizationRow* organization(std::string_view org_id) const;

  // Row indexes into the matching table; empty for unknown keys.
  std::span<const std::size_t> rounds_by_org(std::string_view org_id) const;
  std::span<const std::size_t> investments_by_round(std::string_view round_id) const;
  std::span<const std::size_t> ipos_by_org(std::string_view org_id) const;
  std::span<const std::size_t> acquisitions_by_acquiree(std::string_view org_id) const;
  std::span<const std::size_t> acquisitions_by_acquirer(std::string_view org_id) const;
  std::span<const std::size_t> jobs_by_org(std::string_view org_id) const;

 private:
  using Index = std::unordered_map<std::string, std::vector<std::size_t>>;
  static std::span<const std::size_t> lookup(const Index& index, std::string_view key);

  Tables tables_;
  std::unordered_map<std::string, std::size_t> org_by_id_;
  Index rounds_by_org_;
  Index investments_by_round_;
  Index ipos_by_org_;
  Index acquisitions_by_acquiree_;
  Index acquisitions_by_acquirer_;
  Index jobs_by_org_;
  IntegritySummary integrity_;
};

CompanyStore build_store(Tables tables);

}  // namespace exitbench
