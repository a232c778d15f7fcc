#include "rtvae/data/raw_table.hpp"
#include "rtvae/errors.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <sstream>

namespace rtvae {
namespace {

TableSchema two_columns() {
    return {{{"proto", ColumnKind::categorical}, {"bytes", ColumnKind::continuous}}, {}};
}

TableSchema labelled() {
    return {{{"proto", ColumnKind::categorical},
             {"bytes", ColumnKind::continuous},
             {"id", ColumnKind::ignore},
             {"label", ColumnKind::categorical}},
            LabelSpec{"label", {"normal"}}};
}

TEST(ReadCsv, ThreeLinesTwoColumns) {
    std::istringstream in("tcp,1.5\nudp,2\nicmp,-3e2\n");
    const RawTable t = read_csv(in, two_columns());
    EXPECT_EQ(t.rows, 3u);
    EXPECT_EQ(t.columns[0].categories, (std::vector<std::string>{"tcp", "udp", "icmp"}));
    EXPECT_EQ(t.columns[1].values, (std::vector<double>{1.5, 2.0, -300.0}));
    EXPECT_FALSE(t.has_labels());
}

TEST(ReadCsv, HeaderTrimmingAndBlankLines) {
    std::istringstream in("proto,bytes\n\n tcp , 4 \r\n\nudp,5\n");
    const RawTable t = read_csv(in, two_columns(), CsvOptions{true});
    EXPECT_EQ(t.rows, 2u);
    EXPECT_EQ(t.columns[0].categories[0], "tcp");
    EXPECT_EQ(t.columns[1].values[0], 4.0);
}

TEST(ReadCsv, LabelsAndIgnoredColumns) {
    std::istringstream in("tcp,1,17,normal\nudp,2,18,smurf\n");
    const RawTable t = read_csv(in, labelled());
    ASSERT_EQ(t.columns.size(), 2u);
    EXPECT_EQ(t.labels, (std::vector<Label>{Label::normal, Label::anomaly}));
    EXPECT_EQ(t.filter(Label::anomaly).columns[0].categories,
              (std::vector<std::string>{"udp"}));
}

TEST(ReadCsv, FieldCountMismatchNamesLine) {
    std::istringstream in("tcp,1,1,normal\ntcp,1,1,normal,extra\n");
    try {
        read_csv(in, labelled());
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
    }
}

TEST(ReadCsv, BadNumberNamesLineAndColumn) {
    std::istringstream in("tcp,1\ntcp,abc\n");
    try {
        read_csv(in, two_columns());
        FAIL();
    } catch (const ParseError& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("line 2"), std::string::npos) << msg;
        EXPECT_NE(msg.find("column 2"), std::string::npos) << msg;
        EXPECT_NE(msg.find("abc"), std::string::npos) << msg;
    }
}

TEST(ReadCsv, NonFiniteNumbersAreRejected) {
    std::istringstream in("tcp,nan\n");
    EXPECT_THROW(read_csv(in, two_columns()), ParseError);
    std::istringstream inf("tcp,inf\n");
    EXPECT_THROW(read_csv(inf, two_columns()), ParseError);
}

TEST(ReadCsv, EmptyInputIsAnError) {
    std::istringstream in("\n\n");
    EXPECT_THROW(read_csv(in, two_columns()), ParseError);
}

TEST(ReadCsv, HeaderOnlyGivesZeroRows) {
    std::istringstream in("proto,bytes\n");
    EXPECT_EQ(read_csv(in, two_columns(), CsvOptions{true}).rows, 0u);
}

TEST(IngestCsv, MissingFileNamesPath) {
    try {
        ingest_csv("/nonexistent/data.csv", two_columns());
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("/nonexistent/data.csv"), std::string::npos);
    }
}

TEST(IngestCsv, ReadsFromDisk) {
    testing::TempDir dir("csv");
    testing::write_file(dir / "a.csv", "tcp,1\nudp,2\n");
    EXPECT_EQ(ingest_csv(dir / "a.csv", two_columns()).rows, 2u);
}

TEST(RawTable, SelectKeepsOrder) {
    std::istringstream in("a,1\nb,2\nc,3\n");
    const RawTable t = read_csv(in, two_columns());
    const std::vector<std::size_t> idx{2, 0};
    const RawTable s = t.select(idx);
    EXPECT_EQ(s.rows, 2u);
    EXPECT_EQ(s.columns[0].categories, (std::vector<std::string>{"c", "a"}));
    EXPECT_EQ(s.columns[1].values, (std::vector<double>{3, 1}));
}

} // namespace
} // namespace rtvae
