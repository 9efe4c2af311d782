#include "fixture_repo.hpp"

#include <atomic>
#include <filesystem>
#include <stdexcept>

#include "msr/common.hpp"
#include "msr/subprocess.hpp"

namespace msrtest {

namespace fs = std::filesystem;

namespace {

constexpr std::int64_t kBase = 1700000000;  // 2023-11-14T22:13:20Z
constexpr std::int64_t kStep = 432000;      // 5 days

struct Author {
  const char* name;
  const char* email;
};
constexpr Author kAlice{"Alice Doe", "alice@example.com"};
constexpr Author kBob{"Bob Lin", "bob@example.com"};
constexpr Author kCarol{"Carol Reyes", "carol@example.com"};
constexpr Author kBot{"dependabot[bot]", "support@dependabot.example"};

class RepoBuilder {
 public:
  explicit RepoBuilder(std::string dir) : dir_(std::move(dir)) {
    fs::create_directories(dir_);
    git({"init", "-q", "-b", "master"});
  }

  void write(const std::string& rel, const std::string& content) {
    msr::write_file((fs::path(dir_) / rel).string(), content);
  }

  std::string commit(FixtureLedger& ledger, const std::string& key,
                     const Author& author, std::int64_t at,
                     const std::string& message,
                     std::vector<PlannedMod> mods, bool merge_commit = false) {
    if (!merge_commit) {
      git({"add", "-A"});
      git_at(author, at, {"commit", "-q", "-m", message});
    }
    PlannedCommit pc;
    pc.key = key;
    pc.id = rev_parse_head();
    pc.author_name = author.name;
    pc.author_email = author.email;
    pc.authored_at = at;
    pc.message = message + "\n";  // git's message cleanup appends one newline
    pc.mods = std::move(mods);
    pc.merge = merge_commit;
    ledger.commits.push_back(std::move(pc));
    return ledger.commits.back().id;
  }

  void merge(FixtureLedger& ledger, const std::string& key,
             const Author& author, std::int64_t at, const std::string& branch,
             const std::string& message, std::vector<PlannedMod> mods) {
    git_at(author, at, {"merge", "-q", "--no-ff", "--no-edit", "-m", message, branch});
    commit(ledger, key, author, at, message, std::move(mods), true);
  }

  void checkout_new(const std::string& branch) { git({"checkout", "-q", "-b", branch}); }
  void checkout(const std::string& branch) { git({"checkout", "-q", branch}); }

  const std::string& dir() const { return dir_; }

 private:
  void git(const std::vector<std::string>& args) { git_at(kAlice, kBase, args); }

  void git_at(const Author& author, std::int64_t at,
              const std::vector<std::string>& args) {
    std::vector<std::string> argv = {"git", "-C", dir_};
    argv.insert(argv.end(), args.begin(), args.end());
    const std::string stamp = "@" + std::to_string(at) + " +0000";
    auto res = msr::run_process(
        argv, {{"GIT_AUTHOR_NAME", author.name},
               {"GIT_AUTHOR_EMAIL", author.email},
               {"GIT_COMMITTER_NAME", author.name},
               {"GIT_COMMITTER_EMAIL", author.email},
               {"GIT_AUTHOR_DATE", stamp},
               {"GIT_COMMITTER_DATE", stamp},
               {"GIT_CONFIG_GLOBAL", "/dev/null"},
               {"GIT_CONFIG_SYSTEM", "/dev/null"}});
    if (res.exit_code != 0)
      throw std::runtime_error("fixture git failed: " + argv[3] + ": " + res.err);
  }

  std::string rev_parse_head() {
    auto res = msr::run_process({"git", "-C", dir_, "rev-parse", "HEAD"});
    if (res.exit_code != 0) throw std::runtime_error("rev-parse failed");
    return msr::trim(res.out);
  }

  std::string dir_;
};

// --- fixture file contents ------------------------------------------------

std::string util_java(int appended, bool remedied) {
  std::string s = "package core;\n\npublic class Util {\n";
  for (int k = 1; k <= 36; ++k)
    s += "    public static int h" + std::to_string(k) + "(int v) { return v + " +
         std::to_string(k) + "; }\n";
  for (int k = 1; k <= appended; ++k) {
    if (remedied && k <= 2)
      s += "    public static int g" + std::to_string(k) + "(int v) { return v * " +
           std::to_string(k) + " + 1; }\n";
    else
      s += "    public static int g" + std::to_string(k) + "(int v) { return v * " +
           std::to_string(k) + "; }\n";
  }
  s += "}\n";
  return s;
}

std::string strings_java_v1() {
  std::string s = "package util;\n\npublic class Strings {\n";
  for (int k = 1; k <= 36; ++k)
    s += "    public static String s" + std::to_string(k) +
         "(String v) { return v + \"" + std::to_string(k) + "\"; }\n";
  s += "}\n";
  return s;  // 40 lines
}

std::string strings_java_v2() {
  // lines 10..14 (s7..s11) replaced by three trim helpers: 40 -> 38
  std::string s = "package util;\n\npublic class Strings {\n";
  for (int k = 1; k <= 6; ++k)
    s += "    public static String s" + std::to_string(k) +
         "(String v) { return v + \"" + std::to_string(k) + "\"; }\n";
  for (int k = 1; k <= 3; ++k)
    s += "    public static String t" + std::to_string(k) +
         "(String v) { return v.trim() + \"" + std::to_string(k) + "\"; }\n";
  for (int k = 12; k <= 36; ++k)
    s += "    public static String s" + std::to_string(k) +
         "(String v) { return v + \"" + std::to_string(k) + "\"; }\n";
  s += "}\n";
  return s;
}

std::string strings_java_v3() {
  std::string s = strings_java_v2();
  s.resize(s.size() - 2);  // drop closing "}\n"
  for (int k = 4; k <= 7; ++k)
    s += "    public static String t" + std::to_string(k) +
         "(String v) { return v.strip() + \"" + std::to_string(k) + "\"; }\n";
  s += "}\n";
  return s;
}

std::string main_java_v1() {
  return "package app;\n"
         "\n"
         "public class Main {\n"
         "    public static void main(String[] args) {\n"
         "        System.out.println(\"demo\");\n"
         "    }\n"
         "\n"
         "    static int runs() {\n"
         "        return 0;\n"
         "    }\n"
         "\n"
         "}\n";
}

std::string main_java_v2() {
  return "package app;\n"
         "\n"
         "public class Main {\n"
         "    public static void main(String[] args) {\n"
         "        for (String arg : args) {\n"
         "            System.out.println(arg);\n"
         "        }\n"
         "        System.out.println(\"demo run complete\");\n"
         "    }\n"
         "\n"
         "    static int runs() {\n"
         "        return 1;\n"
         "    }\n"
         "\n"
         "}\n";
}

std::string parser_java_v1() {
  return "package core;\n"
         "\n"
         "public class Parser {\n"
         "    private int depth;\n"
         "\n"
         "    public Parser() {\n"
         "        depth = 0;\n"
         "    }\n"
         "\n"
         "    public Node parse(String s) {\n"
         "        Node root = new Node();\n"
         "        return root;\n"
         "    }\n"
         "\n"
         "    public int depth() {\n"
         "        return depth;\n"
         "    }\n"
         "\n"
         "    // grammar helpers follow\n"
         "}\n";
}

std::string parser_java_v2() {
  return "package core;\n"
         "\n"
         "public class Parser {\n"
         "    private int depth;\n"
         "    private static final int MAX = 16;\n"
         "\n"
         "    public Parser() {\n"
         "        depth = 0;\n"
         "    }\n"
         "\n"
         "    public Node parse(String s) {\n"
         "        if (depth > MAX) {\n"        // line 12, planted by c05
         "            return null;\n"          // line 13, planted by c05
         "        }\n"                         // line 14, planted by c05
         "        Node root = new Node();\n"
         "        return root;\n"
         "    }\n"
         "\n"
         "    public Node parseList(String s) {\n"
         "        Node list = new Node();\n"
         "        depth += 1;\n"
         "        return list;\n"
         "    }\n"
         "\n"
         "    public int depth() {\n"
         "        return depth;\n"
         "    }\n"
         "\n"
         "    // grammar helpers follow\n"
         "}\n";
}

std::string parser_java_v3() {
  std::string s = parser_java_v2();
  const std::string tail = "\n    // grammar helpers follow\n}\n";
  s.resize(s.size() - tail.size());
  s += "\n"
       "    public boolean isBlank(String s) {\n"
       "        return s == null || s.strip().isEmpty();\n"
       "    }\n";
  s += tail;
  return s;
}

std::string parser_java_v4() {
  std::string s = parser_java_v3();
  const std::string planted =
      "        if (depth > MAX) {\n"
      "            return null;\n"
      "        }\n";
  const std::string fixed =
      "        if (s == null || s.isEmpty()) return Node.empty();\n"
      "        depth += 1;\n";
  auto pos = s.find(planted);
  s.replace(pos, planted.size(), fixed);
  return s;
}

std::string dates_java_v1() {
  return "package util;\n"
         "\n"
         "public class Dates {\n"
         "    public static final int EPOCH_YEAR = 1970;\n"
         "\n"
         "    public static int monthIndex(int month) {\n"
         "        int offset = month + 1;\n"  // line 7, planted by c03
         "        return offset;\n"
         "    }\n"
         "\n"
         "    public static boolean isLeap(int year) {\n"
         "        return year % 4 == 0;\n"
         "    }\n"
         "\n"
         "}\n";
}

std::string dates_java_v2() {
  return "package util;\n"
         "\n"
         "public class Dates {\n"
         "    public static final int EPOCH_YEAR = 1970;\n"
         "\n"
         "    public static int monthIndex(int month) {\n"
         "        int offset = month + 1;\n"       // line 7 (c03)
         "        offset = offset & 0xff;\n"       // line 8, planted by c15
         "        return offset;\n"
         "    }\n"
         "\n"
         "    public static boolean isLeap(int year) {\n"
         "        return year % 4 == 0;\n"
         "    }\n"
         "\n"
         "    public static int dayOfYear(int month, int day) {\n"
         "        return monthIndex(month) * 30 + day;\n"
         "    }\n"
         "}\n";
}

std::string dates_java_v3() {
  std::string s = dates_java_v2();
  const std::string planted =
      "        int offset = month + 1;\n"
      "        offset = offset & 0xff;\n";
  const std::string fixed =
      "        int offset = Math.floorMod(month, 12);\n"
      "        int normalized = offset + 1;\n";
  auto pos = s.find(planted);
  s.replace(pos, planted.size(), fixed);
  // the fix also renames the returned variable
  pos = s.find("        return offset;\n");
  s.replace(pos, std::string("        return offset;\n").size(),
            "        return normalized;\n");
  return s;
}

std::string sort_java_v1() {
  return "package core;\n"
         "\n"
         "public class Sort {\n"
         "    public static void sort(int[] values) {\n"
         "        quick(values, 0, values.length - 1);\n"
         "    }\n"
         "\n"
         "    private static void quick(int[] values, int low, int high) {\n"
         "        int pivot = values[low];\n"  // line 9, planted by c07
         "        if (low >= high) {\n"
         "            return;\n"
         "        }\n"
         "        partition(values, low, high, pivot);\n"
         "    }\n"
         "\n"
         "    private static void partition(int[] values, int low, int high, int pivot) {\n"
         "    }\n"
         "}\n";
}

std::string sort_java_v2() {
  std::string s = sort_java_v1();
  const std::string planted = "        int pivot = values[low];\n";
  const std::string fixed = "        int pivot = values[low + (high - low) / 2];\n";
  s.replace(s.find(planted), planted.size(), fixed);
  return s;
}

std::string padded_lines(const std::string& stem, int n) {
  std::string s;
  for (int i = 1; i <= n; ++i) s += stem + " " + std::to_string(i) + "\n";
  return s;
}

}  // namespace

const FixtureLedger& shared_fixture() {
  static FixtureLedger ledger =
      build_fixture_repo(make_temp_dir("fixture") + "/repo");
  return ledger;
}

const PlannedCommit& FixtureLedger::by_key(const std::string& key) const {
  for (const auto& c : commits)
    if (c.key == key) return c;
  throw std::runtime_error("no fixture commit " + key);
}

std::string make_temp_dir(const std::string& hint) {
  static std::atomic<int> counter{0};
  const auto base = fs::temp_directory_path() / "msrkit-tests";
  fs::create_directories(base);
  auto dir = base / (hint + "-" + std::to_string(::getpid()) + "-" +
                     std::to_string(counter++));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir.string();
}

FixtureLedger build_fixture_repo(const std::string& dir) {
  FixtureLedger ledger;
  RepoBuilder repo(dir);
  ledger.repo_dir = dir;
  auto at = [](int step) { return kBase + kStep * step; };

  // c01 .. c10: linear history on master
  repo.write("README.md", padded_lines("# demo project", 5));
  repo.write("src/core/util.java", util_java(0, false));
  repo.write("src/app/main.java", main_java_v1());
  repo.write("build/build.xml", padded_lines("<dependency>", 4));
  repo.commit(ledger, "c01", kAlice, at(0), "Initial project skeleton",
              {{"README.md", "added", 5, 0},
               {"build/build.xml", "added", 4, 0},
               {"src/app/main.java", "added", 12, 0},
               {"src/core/util.java", "added", 40, 0}});

  repo.write("src/core/parser.java", parser_java_v1());
  repo.commit(ledger, "c02", kBob, at(1), "Add parser module",
              {{"src/core/parser.java", "added", 20, 0}});

  repo.write("src/util/dates.java", dates_java_v1());
  repo.commit(ledger, "c03", kAlice, at(2), "Introduce date helpers",
              {{"src/util/dates.java", "added", 15, 0}});

  repo.write("src/util/strings.java", strings_java_v1());
  repo.commit(ledger, "c04", kCarol, at(3), "Add string helpers",
              {{"src/util/strings.java", "added", 40, 0}});

  repo.write("src/core/parser.java", parser_java_v2());
  repo.commit(ledger, "c05", kAlice, at(4), "Expand parser grammar",
              {{"src/core/parser.java", "modified", 10, 0}});

  repo.write("README.md", padded_lines("# demo project", 5) +
                              padded_lines("setup step", 3));
  repo.write("docs/guide.md", padded_lines("guide line", 10));
  repo.commit(ledger, "c06", kBob, at(5), "Document setup steps",
              {{"README.md", "modified", 3, 0}, {"docs/guide.md", "added", 10, 0}});

  repo.write("src/core/sort.java", sort_java_v1());
  repo.commit(ledger, "c07", kCarol, at(6), "Add sorting routine",
              {{"src/core/sort.java", "added", 18, 0}});

  repo.write("build/build.xml", "<dependency> 1\n<dependency> 2 pinned\n"
                                "<dependency> 3 pinned\n<dependency> 4\n");
  repo.commit(ledger, "c08", kBot, at(7), "Update dependency versions",
              {{"build/build.xml", "modified", 2, 2}});

  repo.write("src/app/main.java", main_java_v2());
  repo.commit(ledger, "c09", kAlice, at(8), "Refactor main loop",
              {{"src/app/main.java", "modified", 5, 2}});

  repo.write("README.md", padded_lines("# demo project", 5) +
                              "setup step 1\nsetup step 2 (clarified)\nsetup step 3\n");
  repo.commit(ledger, "c10", kBob, at(9), "Correct typo in README",
              {{"README.md", "modified", 1, 1}});

  // branch with parser work, merged back at M1
  repo.checkout_new("feat");
  repo.write("src/core/parser.java", parser_java_v3());
  repo.commit(ledger, "c11a", kCarol, at(10), "Improve parser whitespace handling",
              {{"src/core/parser.java", "modified", 4, 0}});

  repo.checkout("master");
  repo.write("src/app/cli.java", padded_lines("// cli entry", 10));
  repo.commit(ledger, "c11b", kAlice, at(11), "Add CLI entry point",
              {{"src/app/cli.java", "added", 10, 0}});

  repo.merge(ledger, "m1", kCarol, at(12), "feat", "Merge branch 'feat'",
             {{"src/core/parser.java", "modified", 4, 0}});

  // quick-remedy pair
  repo.write("src/core/util.java", util_java(12, false));
  repo.write("src/util/strings.java", strings_java_v2());
  repo.commit(ledger, "c12a", kAlice, at(13), "Rework util helpers",
              {{"src/core/util.java", "modified", 12, 0},
               {"src/util/strings.java", "modified", 3, 5}});

  repo.write("src/core/util.java", util_java(12, true));
  repo.commit(ledger, "c12b", kAlice, kBase + kStep * 13 + 120,
              "Complete rework of util helpers",
              {{"src/core/util.java", "modified", 2, 2}});

  // tangled: six directories in one commit
  repo.write("src/core/meta.java", padded_lines("// core meta", 3));
  repo.write("src/app/meta.java", padded_lines("// app meta", 3));
  repo.write("src/util/meta.java", padded_lines("// util meta", 3));
  repo.write("docs/meta.md", padded_lines("meta note", 3));
  repo.write("build/meta.xml", padded_lines("<meta>", 3));
  repo.write("scripts/meta.sh", padded_lines("echo meta", 3));
  repo.commit(ledger, "c13", kBob, at(14), "Standardize module boilerplate",
              {{"build/meta.xml", "added", 3, 0},
               {"docs/meta.md", "added", 3, 0},
               {"scripts/meta.sh", "added", 3, 0},
               {"src/app/meta.java", "added", 3, 0},
               {"src/core/meta.java", "added", 3, 0},
               {"src/util/meta.java", "added", 3, 0}});

  // fix 1: deletes the c05 trio in parser.java
  repo.write("src/core/parser.java", parser_java_v4());
  repo.write("tests/test_parser.java", padded_lines("// parser test", 8));
  repo.commit(ledger, "c14", kCarol, at(15), "Fix crash when parser input is empty",
              {{"src/core/parser.java", "modified", 2, 3},
               {"tests/test_parser.java", "added", 8, 0}});

  repo.write("src/util/dates.java", dates_java_v2());
  repo.commit(ledger, "c15", kBob, at(16), "Extend date helpers",
              {{"src/util/dates.java", "modified", 4, 0}});

  // fix 2: deletes one c03 line and one c15 line; oldest blamed wins
  repo.write("src/util/dates.java", dates_java_v3());
  repo.commit(ledger, "c16", kAlice, at(17),
              "Correct error in date arithmetic\n\nThis fix aligns month offsets.",
              {{"src/util/dates.java", "modified", 3, 3}});

  repo.write("docs/guide.md", padded_lines("guide line", 8) +
                                  "guide line 9 (upstream)\nguide line 10 (upstream)\n");
  repo.commit(ledger, "c17", kBob, at(18), "Merge latest upstream snapshot",
              {{"docs/guide.md", "modified", 2, 2}});

  // fix 3: classified through the linked issue's bug label
  repo.write("src/core/sort.java", sort_java_v2());
  repo.commit(ledger, "c18", kCarol, at(19), "Resolve #9 in sorting routine",
              {{"src/core/sort.java", "modified", 1, 1}});

  repo.write("scripts/meta.sh", "echo meta 1\necho meta 2 quiet\necho meta 3\n");
  repo.commit(ledger, "c19", kBob, at(20), "Resolve lint warnings in build scripts",
              {{"scripts/meta.sh", "modified", 1, 1}});

  repo.write("tests/test_strings.java", padded_lines("// strings test", 10));
  repo.commit(ledger, "c20", kAlice, at(21), "Add tests for string helpers",
              {{"tests/test_strings.java", "added", 10, 0}});

  repo.write("assets/logo.bin", std::string("\x89PNG\x00\x01\x02logo\x00payload", 19));
  repo.commit(ledger, "c21", kCarol, at(22), "Add project logo asset",
              {{"assets/logo.bin", "added", 0, 0, true}});

  repo.write("docs/deploy.md", padded_lines("deploy step", 8));
  repo.commit(ledger, "c22", kBob, at(23), "Describe deployment steps",
              {{"docs/deploy.md", "added", 8, 0}});

  repo.write("config/settings.yml", padded_lines("setting:", 6));
  repo.commit(ledger, "c23", kAlice, at(24), "Update settings defaults",
              {{"config/settings.yml", "added", 6, 0}});

  repo.write("README.md", padded_lines("# demo project", 5) +
                              "setup step 1\nsetup step 2 (clarified)\nsetup step 3\n" +
                              padded_lines("usage note", 4));
  repo.commit(ledger, "c24", kCarol, at(25), "Add usage section to README",
              {{"README.md", "modified", 4, 0}});

  repo.write("src/util/strings.java", strings_java_v3());
  repo.commit(ledger, "c25", kBob, at(26), "Extend string helpers",
              {{"src/util/strings.java", "modified", 4, 0}});

  repo.write("CHANGELOG.md", padded_lines("change", 4));
  repo.commit(ledger, "c26", kAlice, at(27), "Add changelog",
              {{"CHANGELOG.md", "added", 4, 0}});

  repo.write("docs/guide.md", padded_lines("guide line", 8) +
                                  "guide line 9 (upstream)\nguide line 10 (upstream)\n" +
                                  padded_lines("usage note", 3));
  repo.commit(ledger, "c27", kCarol, at(28), "Annotate guide with usage notes",
              {{"docs/guide.md", "modified", 3, 0}});

  // companion issue file: #9 carries the bug label
  ledger.issues_path = (fs::path(dir).parent_path() / "issues.json").string();
  msr::write_file(ledger.issues_path,
                  "[{\"id\": \"9\", \"labels\": [\"bug\"], \"closed_at\": " +
                      std::to_string(at(19)) + "}]\n");

  // planted expectations
  ledger.fix_keys = {"c14", "c16", "c18"};
  ledger.fix_evidence = {{"c14", {"fix", "crash"}},
                         {"c16", {"fix", "error"}},
                         {"c18", {"label:bug"}}};
  ledger.links = {{"c14", "src/core/parser.java", "c05", {12, 13, 14}},
                  {"c16", "src/util/dates.java", "c03", {7, 9}},
                  {"c18", "src/core/sort.java", "c07", {9}}};
  ledger.removed = {{"m1", "MERGE"},  {"c17", "MERGE"},
                    {"c08", "BOT"},   {"c10", "NOISY"},
                    {"c19", "NOISY"}, {"c12b", "QUICK_REMEDY"}};
  ledger.tangled_keys = {"c13"};
  ledger.failure_prone_keys = {"c03", "c05", "c07", "c11a", "c15", "m1"};
  return ledger;
}

}  // namespace msrtest
