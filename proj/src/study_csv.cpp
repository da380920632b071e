#include "dxmcp/study_csv.hpp"

#include <sstream>

namespace dxmcp {

namespace {

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

int parse_binary(const std::string& cell, std::size_t line, std::size_t col, const char* what) {
  if (cell == "0") return 0;
  if (cell == "1") return 1;
  std::ostringstream msg;
  msg << "line " << line << ", column " << col + 1 << ": " << what << " must be 0 or 1, got '"
      << cell << "'";
  throw CsvError(msg.str());
}

}  // namespace

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

LabeledPredictions read_labeled_csv(std::istream& in) {
  LabeledPredictions table;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto cells = split_csv_line(line);
    if (!have_header) {
      if (cells.empty() || cells.front() != "label")
        throw CsvError("line " + std::to_string(line_no) +
                       ": expected header 'label,<test1>,<test2>,...'");
      if (cells.size() < 2) throw CsvError("header names no test columns");
      table.test_names.assign(cells.begin() + 1, cells.end());
      have_header = true;
      continue;
    }
    if (cells.size() != table.test_names.size() + 1) {
      std::ostringstream msg;
      msg << "line " << line_no << ": expected " << table.test_names.size() + 1
          << " columns, found " << cells.size();
      throw CsvError(msg.str());
    }
    table.label.push_back(parse_binary(cells[0], line_no, 0, "label"));
    std::vector<int> row(table.test_names.size());
    for (std::size_t j = 1; j < cells.size(); ++j)
      row[j - 1] = parse_binary(cells[j], line_no, j, "prediction");
    table.predictions.push_back(std::move(row));
  }
  if (!have_header) throw CsvError("empty input: expected header 'label,<test1>,<test2>,...'");
  return table;
}

void write_labeled_csv(std::ostream& out, const LabeledPredictions& table) {
  out << "label";
  for (const auto& name : table.test_names) out << ',' << name;
  out << '\n';
  for (std::size_t i = 0; i < table.label.size(); ++i) {
    out << table.label[i];
    for (int v : table.predictions[i]) out << ',' << v;
    out << '\n';
  }
}

RawStudy to_raw_study(const LabeledPredictions& table) {
  RawStudy raw;
  raw.test_names = table.test_names;
  for (std::size_t i = 0; i < table.label.size(); ++i) {
    const auto& pred = table.predictions[i];
    if (table.label[i] == 1) {
      raw.q1.emplace_back(pred.begin(), pred.end());
    } else {
      std::vector<long long> correct(pred.size());
      for (std::size_t j = 0; j < pred.size(); ++j) correct[j] = 1 - pred[j];
      raw.q0.push_back(std::move(correct));
    }
  }
  return raw;
}

}  // namespace dxmcp
