#ifndef MSR_DATASET_HPP
#define MSR_DATASET_HPP

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "msr/common.hpp"
#include "msr/metrics.hpp"

namespace msr {

/// One dataset row per kept commit: repo id, the 14 metrics, the SZZ
/// label and the tangled flag. 18 columns, fixed order.
struct DatasetRow {
  std::string repo;
  ChangeMetrics metrics;
  bool failure_prone = false;
  bool flagged_tangled = false;

  bool operator==(const DatasetRow&) const = default;
};

inline constexpr const char* kDatasetHeader =
    "repo,commit_id,ns,nd,nf,entropy,la,ld,lt,fix,ndev,age,nuc,exp,rexp,sexp,"
    "failure_prone,flagged_tangled";

/// RFC-4180 quoting: fields containing comma, quote or line breaks are
/// wrapped, embedded quotes doubled.
inline std::string csv_quote(std::string_view field) {
  bool needs = field.find_first_of(",\"\r\n") != std::string_view::npos;
  if (!needs) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += "\"";
  return out;
}

inline std::string dataset_row_to_csv(const DatasetRow& r) {
  const ChangeMetrics& m = r.metrics;
  std::string line;
  line += csv_quote(r.repo);
  line += ',';
  line += csv_quote(m.commit_id);
  line += ',' + std::to_string(m.ns);
  line += ',' + std::to_string(m.nd);
  line += ',' + std::to_string(m.nf);
  line += ',' + format_fixed6(m.entropy);
  line += ',' + std::to_string(m.la);
  line += ',' + std::to_string(m.ld);
  line += ',' + format_fixed6(m.lt);
  line += m.fix ? ",true" : ",false";
  line += ',' + std::to_string(m.ndev);
  line += ',' + format_fixed6(m.age);
  line += ',' + std::to_string(m.nuc);
  line += ',' + std::to_string(m.exp);
  line += ',' + format_fixed6(m.rexp);
  line += ',' + std::to_string(m.sexp);
  line += r.failure_prone ? ",true" : ",false";
  line += r.flagged_tangled ? ",true" : ",false";
  return line;
}

inline size_t write_dataset_csv(const std::vector<DatasetRow>& rows,
                                const std::string& path) {
  std::string out = std::string(kDatasetHeader) + "\n";
  for (const auto& r : rows) out += dataset_row_to_csv(r) + "\n";
  write_file(path, out);
  return rows.size();
}

/// Minimal RFC-4180 record reader; handles quoted fields and embedded
/// newlines.
inline std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> row;
  std::string field;
  bool in_quotes = false;
  size_t i = 0;
  auto end_field = [&] {
    row.push_back(field);
    field.clear();
  };
  auto end_row = [&] {
    end_field();
    records.push_back(row);
    row.clear();
  };
  while (i < text.size()) {
    char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      in_quotes = true;
    } else if (c == ',') {
      end_field();
    } else if (c == '\n') {
      end_row();
    } else if (c == '\r') {
      // swallow; LF terminates the record
    } else {
      field += c;
    }
    ++i;
  }
  if (!field.empty() || !row.empty()) end_row();
  return records;
}

inline std::vector<DatasetRow> read_dataset_csv(const std::string& path) {
  auto records = parse_csv(read_file(path));
  if (records.empty() || records[0] != parse_csv(kDatasetHeader)[0])
    throw Error(Errc::malformed_document, "unexpected dataset header in " + path);
  std::vector<DatasetRow> rows;
  auto to_bool = [&](const std::string& s) {
    if (s == "true") return true;
    if (s == "false") return false;
    throw Error(Errc::malformed_document, "boolean field: " + s);
  };
  for (size_t i = 1; i < records.size(); ++i) {
    const auto& rec = records[i];
    if (rec.size() != 18)
      throw Error(Errc::malformed_document,
                  "row " + std::to_string(i) + " has " +
                      std::to_string(rec.size()) + " fields");
    DatasetRow r;
    try {
      r.repo = rec[0];
      r.metrics.commit_id = rec[1];
      r.metrics.ns = std::stoll(rec[2]);
      r.metrics.nd = std::stoll(rec[3]);
      r.metrics.nf = std::stoll(rec[4]);
      r.metrics.entropy = std::stod(rec[5]);
      r.metrics.la = std::stoll(rec[6]);
      r.metrics.ld = std::stoll(rec[7]);
      r.metrics.lt = std::stod(rec[8]);
      r.metrics.fix = to_bool(rec[9]);
      r.metrics.ndev = std::stoll(rec[10]);
      r.metrics.age = std::stod(rec[11]);
      r.metrics.nuc = std::stoll(rec[12]);
      r.metrics.exp = std::stoll(rec[13]);
      r.metrics.rexp = std::stod(rec[14]);
      r.metrics.sexp = std::stoll(rec[15]);
      r.failure_prone = to_bool(rec[16]);
      r.flagged_tangled = to_bool(rec[17]);
    } catch (const std::invalid_argument&) {
      throw Error(Errc::malformed_document, "bad numeric field in row " + std::to_string(i));
    } catch (const std::out_of_range&) {
      throw Error(Errc::malformed_document, "numeric overflow in row " + std::to_string(i));
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace msr

#endif  // MSR_DATASET_HPP
