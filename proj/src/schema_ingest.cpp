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

#include "exitbench/schema_ingest.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <future>
#include <sstream>
#include <unordered_set>

#include "exitbench/csv.hpp"
#include "exitbench/error.hpp"
#include "exitbench/text.hpp"

namespace exitbench {
namespace {

constexpr std::string_view kOrgColumns[] = {"org_id", "name", "description", "founded_on",
                                            "created_at"};
constexpr std::string_view kRoundColumns[] = {"round_id", "org_id", "announced_on",
                                              "raised_usd"};
constexpr std::string_view kInvestmentColumns[] = {"round_id", "investor_id"};
constexpr std::string_view kIpoColumns[] = {"org_id", "went_public_on"};
constexpr std::string_view kAcquisitionColumns[] = {"acquiree_id", "acquirer_id",
                                                    "announced_on"};
constexpr std::string_view kJobColumns[] = {"org_id", "person_id", "title"};

// Thrown inside row parsers; turned into a RowError by the loader.
struct RowFailure {
  std::string reason;
};

// Field access by logical name for one CSV record.
class FieldView {
 public:
  FieldView(const std::vector<std::string>& fields,
            const std::unordered_map<std::string, std::size_t>& positions)
      : fields_(fields), positions_(positions) {}

  const std::string& get(std::string_view logical) const {
    return fields_[positions_.at(std::string(logical))];
  }

  std::string required(std::string_view logical) const {
    std::string v(text::trim(get(logical)));
    if (v.empty()) throw RowFailure{"empty " + std::string(logical)};
    return v;
  }

  std::optional<Date> date(std::string_view logical) const {
    const auto raw = text::trim(get(logical));
    if (raw.empty()) return std::nullopt;
    auto d = Date::parse(raw);
    if (!d) throw RowFailure{"malformed date in " + std::string(logical) + ": '" +
                             std::string(raw) + "'"};
    return d;
  }

  std::optional<double> amount(std::string_view logical) const {
    const auto raw = text::trim(get(logical));
    if (raw.empty()) return std::nullopt;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), v);
    if (ec != std::errc() || ptr != raw.data() + raw.size() || !std::isfinite(v)) {
      throw RowFailure{"malformed amount in " + std::string(logical) + ": '" +
                       std::string(raw) + "'"};
    }
    if (v < 0.0) throw RowFailure{"negative amount in " + std::string(logical)};
    return v;
  }

 private:
  const std::vector<std::string>& fields_;
  const std::unordered_map<std::string, std::size_t>& positions_;
};

template <typename Row, typename ParseFn>
LoadResult<Row> load_generic(const std::filesystem::path& path, const ColumnMapping& mapping,
                             TableKind kind, const LoadOptions& options, ParseFn parse) {
  if (!std::filesystem::exists(path)) throw IoError("missing table file " + path.string());
  auto records = csv::read_file(path);
  if (records.empty()) throw DataError(path.string() + ": header row missing");

  const auto& header = records.front().fields;
  std::unordered_map<std::string, std::size_t> physical_pos;
  for (std::size_t i = 0; i < header.size(); ++i) {
    std::string name(text::trim(header[i]));
    if (i == 0 && name.rfind("\xEF\xBB\xBF", 0) == 0) name.erase(0, 3);  // BOM
    physical_pos.emplace(std::move(name), i);
  }
  std::unordered_map<std::string, std::size_t> positions;
  for (auto logical : logical_columns(kind)) {
    const auto physical = mapping.physical(kind, logical);
    auto it = physical_pos.find(physical);
    if (it == physical_pos.end()) {
      throw DataError(path.string() + ": column '" + physical + "' (for " +
                      std::string(logical) + ") not in header");
    }
    positions.emplace(std::string(logical), it->second);
  }

  LoadResult<Row> result;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    std::string reason;
    if (rec.malformed) {
      reason = "malformed CSV quoting";
    } else if (rec.fields.size() != header.size()) {
      reason = "expected " + std::to_string(header.size()) + " fields, got " +
               std::to_string(rec.fields.size());
    } else {
      try {
        result.rows.push_back(parse(FieldView(rec.fields, positions)));
        continue;
      } catch (const RowFailure& f) {
        reason = f.reason;
      }
    }
    if (options.strict) {
      throw DataError(path.string() + ":" + std::to_string(rec.line) + ": " + reason);
    }
    result.errors.push_back(RowError{rec.line, std::move(reason)});
  }
  return result;
}

std::string row_cell(const std::optional<Date>& d) { return d ? d->iso() : std::string(); }

std::string row_cell(const std::optional<double>& v) {
  if (!v) return {};
  std::ostringstream os;
  os.precision(17);
  os << *v;
  return os.str();
}

}  // namespace

std::string_view table_name(TableKind kind) {
  switch (kind) {
    case TableKind::kOrganizations:
      return "organizations";
    case TableKind::kFundingRounds:
      return "funding_rounds";
    case TableKind::kInvestments:
      return "investments";
    case TableKind::kIpos:
      return "ipos";
    case TableKind::kAcquisitions:
      return "acquisitions";
    case TableKind::kJobs:
      return "jobs";
  }
  return "unknown";
}

TableKind table_kind_from_name(std::string_view name) {
  for (auto kind : kAllTableKinds) {
    if (table_name(kind) == name) return kind;
  }
  throw UsageError("unknown table kind '" + std::string(name) + "'");
}

std::span<const std::string_view> logical_columns(TableKind kind) {
  switch (kind) {
    case TableKind::kOrganizations:
      return kOrgColumns;
    case TableKind::kFundingRounds:
      return kRoundColumns;
    case TableKind::kInvestments:
      return kInvestmentColumns;
    case TableKind::kIpos:
      return kIpoColumns;
    case TableKind::kAcquisitions:
      return kAcquisitionColumns;
    case TableKind::kJobs:
      return kJobColumns;
  }
  return {};
}

// ---------------------------------------------------------------------------
// ColumnMapping

ColumnMapping ColumnMapping::crunchbase_defaults() {
  ColumnMapping m;
  m.set(TableKind::kOrganizations, "org_id", "uuid");
  m.set(TableKind::kOrganizations, "description", "short_description");
  m.set(TableKind::kFundingRounds, "round_id", "uuid");
  m.set(TableKind::kFundingRounds, "org_id", "org_uuid");
  m.set(TableKind::kFundingRounds, "raised_usd", "raised_amount_usd");
  m.set(TableKind::kInvestments, "round_id", "funding_round_uuid");
  m.set(TableKind::kInvestments, "investor_id", "investor_uuid");
  m.set(TableKind::kIpos, "org_id", "org_uuid");
  m.set(TableKind::kAcquisitions, "acquiree_id", "acquiree_uuid");
  m.set(TableKind::kAcquisitions, "acquirer_id", "acquirer_uuid");
  m.set(TableKind::kJobs, "org_id", "org_uuid");
  m.set(TableKind::kJobs, "person_id", "person_uuid");
  return m;
}

ColumnMapping ColumnMapping::identity() { return ColumnMapping{}; }

ColumnMapping ColumnMapping::parse(std::string_view text_in) {
  ColumnMapping m = crunchbase_defaults();
  std::istringstream in{std::string(text_in)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto body = text::trim(line);
    if (body.empty()) continue;
    auto eq = body.find('=');
    if (eq == std::string_view::npos) {
      throw UsageError("mapping line " + std::to_string(lineno) + ": expected key = value");
    }
    auto key = text::trim(body.substr(0, eq));
    auto value = text::trim(body.substr(eq + 1));
    auto dot = key.find('.');
    if (dot == std::string_view::npos || value.empty()) {
      throw UsageError("mapping line " + std::to_string(lineno) +
                       ": expected table.logical = physical");
    }
    const auto kind = table_kind_from_name(key.substr(0, dot));
    const auto logical = key.substr(dot + 1);
    bool known = false;
    for (auto col : logical_columns(kind)) known = known || col == logical;
    if (!known) {
      throw UsageError("mapping line " + std::to_string(lineno) + ": unknown column '" +
                       std::string(key) + "'");
    }
    m.set(kind, logical, std::string(value));
  }
  return m;
}

ColumnMapping ColumnMapping::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open mapping file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::string ColumnMapping::physical(TableKind kind, std::string_view logical) const {
  auto it = columns_.find({kind, std::string(logical)});
  return it == columns_.end() ? std::string(logical) : it->second;
}

void ColumnMapping::set(TableKind kind, std::string_view logical, std::string physical) {
  columns_[{kind, std::string(logical)}] = std::move(physical);
}

std::string ColumnMapping::to_text() const {
  std::string out;
  for (auto kind : kAllTableKinds) {
    for (auto logical : logical_columns(kind)) {
      out += std::string(table_name(kind)) + "." + std::string(logical) + " = " +
             physical(kind, logical) + "\n";
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Loaders

LoadResult<OrganizationRow> load_organizations(const std::filesystem::path& path,
                                               const ColumnMapping& mapping,
                                               const LoadOptions& options) {
  std::unordered_set<std::string> seen;
  return load_generic<OrganizationRow>(
      path, mapping, TableKind::kOrganizations, options, [&](const FieldView& f) {
        OrganizationRow row;
        row.org_id = f.required("org_id");
        row.name = f.get("name");
        row.description = f.get("description");
        row.founded_on = f.date("founded_on");
        row.created_at = f.date("created_at");
        if (!seen.insert(row.org_id).second) {
          throw RowFailure{"duplicate org_id " + row.org_id};
        }
        return row;
      });
}

LoadResult<FundingRoundRow> load_funding_rounds(const std::filesystem::path& path,
                                                const ColumnMapping& mapping,
                                                const LoadOptions& options) {
  std::unordered_set<std::string> seen;
  return load_generic<FundingRoundRow>(
      path, mapping, TableKind::kFundingRounds, options, [&](const FieldView& f) {
        FundingRoundRow row;
        row.round_id = f.required("round_id");
        row.org_id = f.required("org_id");
        row.announced_on = f.date("announced_on");
        row.raised_usd = f.amount("raised_usd");
        if (!seen.insert(row.round_id).second) {
          throw RowFailure{"duplicate round_id " + row.round_id};
        }
        return row;
      });
}

LoadResult<InvestmentRow> load_investments(const std::filesystem::path& path,
                                           const ColumnMapping& mapping,
                                           const LoadOptions& options) {
  return load_generic<InvestmentRow>(path, mapping, TableKind::kInvestments, options,
                                     [](const FieldView& f) {
                                       InvestmentRow row;
                                       row.round_id = f.required("round_id");
                                       row.investor_id = f.required("investor_id");
                                       return row;
                                     });
}

LoadResult<IpoRow> load_ipos(const std::filesystem::path& path, const ColumnMapping& mapping,
                             const LoadOptions& options) {
  return load_generic<IpoRow>(path, mapping, TableKind::kIpos, options,
                              [](const FieldView& f) {
                                IpoRow row;
                                row.org_id = f.required("org_id");
                                row.went_public_on = f.date("went_public_on");
                                return row;
                              });
}

LoadResult<AcquisitionRow> load_acquisitions(const std::filesystem::path& path,
                                             const ColumnMapping& mapping,
                                             const LoadOptions& options) {
  return load_generic<AcquisitionRow>(
      path, mapping, TableKind::kAcquisitions, options, [](const FieldView& f) {
        AcquisitionRow row;
        row.acquiree_id = f.required("acquiree_id");
        row.acquirer_id = f.required("acquirer_id");
        row.announced_on = f.date("announced_on");
        if (row.acquiree_id == row.acquirer_id) {
          throw RowFailure{"acquiree equals acquirer " + row.acquiree_id};
        }
        return row;
      });
}

LoadResult<JobRow> load_jobs(const std::filesystem::path& path, const ColumnMapping& mapping,
                             const LoadOptions& options) {
  return load_generic<JobRow>(path, mapping, TableKind::kJobs, options,
                              [](const FieldView& f) {
                                JobRow row;
                                row.org_id = f.required("org_id");
                                row.person_id = f.get("person_id");
                                row.title = f.get("title");
                                return row;
                              });
}

std::size_t TablesLoad::error_count() const {
  std::size_t n = 0;
  for (const auto& [kind, errs] : errors) n += errs.size();
  return n;
}

TablesLoad load_tables(const std::filesystem::path& dir, const ColumnMapping& mapping,
                       const LoadOptions& options) {
  auto file = [&](TableKind kind) { return dir / (std::string(table_name(kind)) + ".csv"); };
  auto orgs = std::async(std::launch::async, load_organizations,
                         file(TableKind::kOrganizations), std::cref(mapping), options);
  auto rounds = std::async(std::launch::async, load_funding_rounds,
                           file(TableKind::kFundingRounds), std::cref(mapping), options);
  auto investments = std::async(std::launch::async, load_investments,
                                file(TableKind::kInvestments), std::cref(mapping), options);
  auto ipos =
      std::async(std::launch::async, load_ipos, file(TableKind::kIpos), std::cref(mapping), options);
  auto acquisitions = std::async(std::launch::async, load_acquisitions,
                                 file(TableKind::kAcquisitions), std::cref(mapping), options);
  auto jobs =
      std::async(std::launch::async, load_jobs, file(TableKind::kJobs), std::cref(mapping), options);

  TablesLoad out;
  auto take = [&](auto& fut, auto& rows, TableKind kind) {
    auto r = fut.get();
    rows = std::move(r.rows);
    out.errors[kind] = std::move(r.errors);
  };
  take(orgs, out.tables.organizations, TableKind::kOrganizations);
  take(rounds, out.tables.funding_rounds, TableKind::kFundingRounds);
  take(investments, out.tables.investments, TableKind::kInvestments);
  take(ipos, out.tables.ipos, TableKind::kIpos);
  take(acquisitions, out.tables.acquisitions, TableKind::kAcquisitions);
  take(jobs, out.tables.jobs, TableKind::kJobs);
  return out;
}

void write_table(const std::filesystem::path& path, const Tables& t, TableKind kind,
                 const ColumnMapping& mapping) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  std::vector<std::string> header;
  for (auto logical : logical_columns(kind)) header.push_back(mapping.physical(kind, logical));
  csv::write_row(out, header);
  switch (kind) {
    case TableKind::kOrganizations:
      for (const auto& r : t.organizations) {
        csv::write_row(out, {r.org_id, r.name, r.description, row_cell(r.founded_on),
                             row_cell(r.created_at)});
      }
      break;
    case TableKind::kFundingRounds:
      for (const auto& r : t.funding_rounds) {
        csv::write_row(out,
                       {r.round_id, r.org_id, row_cell(r.announced_on), row_cell(r.raised_usd)});
      }
      break;
    case TableKind::kInvestments:
      for (const auto& r : t.investments) csv::write_row(out, {r.round_id, r.investor_id});
      break;
    case TableKind::kIpos:
      for (const auto& r : t.ipos) csv::write_row(out, {r.org_id, row_cell(r.went_public_on)});
      break;
    case TableKind::kAcquisitions:
      for (const auto& r : t.acquisitions) {
        csv::write_row(out, {r.acquiree_id, r.acquirer_id, row_cell(r.announced_on)});
      }
      break;
    case TableKind::kJobs:
      for (const auto& r : t.jobs) csv::write_row(out, {r.org_id, r.person_id, r.title});
      break;
  }
  if (!out) throw IoError("write failure on " + path.string());
}

void write_tables(const std::filesystem::path& dir, const Tables& tables,
                  const ColumnMapping& mapping) {
  std::filesystem::create_directories(dir);
  for (auto kind : kAllTableKinds) {
    write_table(dir / (std::string(table_name(kind)) + ".csv"), tables, kind, mapping);
  }
}

// ---------------------------------------------------------------------------
// Store

std::size_t IntegritySummary::total() const {
  std::size_t n = 0;
  for (const auto& [name, issue] : issues) n += issue.count;
  return n;
}

std::size_t IntegritySummary::count(std::string_view check) const {
  auto it = issues.find(std::string(check));
  return it == issues.end() ? 0 : it->second.count;
}

nlohmann::json IntegritySummary::to_json() const {
  nlohmann::json checks = nlohmann::json::object();
  for (const auto& [name, issue] : issues) {
    checks[name] = {{"count", issue.count}, {"samples", issue.samples}};
  }
  return {{"total", total()}, {"checks", checks}};
}

CompanyStore::CompanyStore(Tables tables) : tables_(std::move(tables)) {
  constexpr std::size_t kMaxSamples = 5;
  auto flag = [&](const std::string& check, const std::string& key) {
    auto& issue = integrity_.issues[check];
    ++issue.count;
    if (issue.samples.size() < kMaxSamples) issue.samples.push_back(key);
  };

  for (std::size_t i = 0; i < tables_.organizations.size(); ++i) {
    org_by_id_.emplace(tables_.organizations[i].org_id, i);
  }
  auto known_org = [&](const std::string& id) { return org_by_id_.count(id) != 0; };

  std::unordered_set<std::string> round_ids;
  for (std::size_t i = 0; i < tables_.funding_rounds.size(); ++i) {
    const auto& r = tables_.funding_rounds[i];
    rounds_by_org_[r.org_id].push_back(i);
    round_ids.insert(r.round_id);
    if (!known_org(r.org_id)) flag("funding_round_unknown_org", r.round_id);
  }
  for (std::size_t i = 0; i < tables_.investments.size(); ++i) {
    const auto& r = tables_.investments[i];
    investments_by_round_[r.round_id].push_back(i);
    if (!round_ids.count(r.round_id)) flag("investment_unknown_round", r.round_id);
  }
  for (std::size_t i = 0; i < tables_.ipos.size(); ++i) {
    const auto& r = tables_.ipos[i];
    ipos_by_org_[r.org_id].push_back(i);
    if (!known_org(r.org_id)) flag("ipo_unknown_org", r.org_id);
  }
  for (std::size_t i = 0; i < tables_.acquisitions.size(); ++i) {
    const auto& r = tables_.acquisitions[i];
    acquisitions_by_acquiree_[r.acquiree_id].push_back(i);
    acquisitions_by_acquirer_[r.acquirer_id].push_back(i);
    if (!known_org(r.acquiree_id)) flag("acquisition_unknown_acquiree", r.acquiree_id);
    if (!known_org(r.acquirer_id)) flag("acquisition_unknown_acquirer", r.acquirer_id);
  }
  for (std::size_t i = 0; i < tables_.jobs.size(); ++i) {
    const auto& r = tables_.jobs[i];
    jobs_by_org_[r.org_id].push_back(i);
    if (!known_org(r.org_id)) flag("job_unknown_org", r.org_id);
  }
}

const OrganizationRow* CompanyStore::organization(std::string_view org_id) const {
  auto it = org_by_id_.find(std::string(org_id));
  return it == org_by_id_.end() ? nullptr : &tables_.organizations[it->second];
}

std::span<const std::size_t> CompanyStore::lookup(const Index& index, std::string_view key) {
  auto it = index.find(std::string(key));
  if (it == index.end()) return {};
  return it->second;
}

std::span<const std::size_t> CompanyStore::rounds_by_org(std::string_view id) const {
  return lookup(rounds_by_org_, id);
}
std::span<const std::size_t> CompanyStore::investments_by_round(std::string_view id) const {
  return lookup(investments_by_round_, id);
}
std::span<const std::size_t> CompanyStore::ipos_by_org(std::string_view id) const {
  return lookup(ipos_by_org_, id);
}
std::span<const std::size_t> CompanyStore::acquisitions_by_acquiree(std::string_view id) const {
  return lookup(acquisitions_by_acquiree_, id);
}
std::span<const std::size_t> CompanyStore::acquisitions_by_acquirer(std::string_view id) const {
  return lookup(acquisitions_by_acquirer_, id);
}
std::span<const std::size_t> CompanyStore::jobs_by_org(std::string_view id) const {
  return lookup(jobs_by_org_, id);
}

CompanyStore build_store(Tables tables) { return CompanyStore(std::move(tables)); }

}  // namespace exitbench
