//! Point clouds, element grouping and Euclidean distance matrices.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use thiserror::Error;

use crate::par;

#[derive(Debug, Error, PartialEq)]
pub enum GeometryError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("point {id} has {got} coordinates, expected {expected}")]
    Dimension { id: usize, expected: usize, got: usize },
    #[error("point ids must be unique and contiguous from 0")]
    NonContiguousIds,
    #[error("point cloud dimension must be at least 1")]
    ZeroDimension,
    #[error("group {group} selects no points")]
    EmptyGroup { group: usize },
    #[error("label {label:?} in group {group} does not occur in the cloud")]
    UnknownLabel { group: usize, label: String },
    #[error("a grouping needs at least two groups, got {0}")]
    TooFewGroups(usize),
    #[error("invalid grouping specification: {0}")]
    BadGrouping(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    pub id: usize,
    pub label: String,
    pub coords: Vec<f64>,
}

/// A labelled point cloud. Ids are `0..len()` in order.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    dim: usize,
    points: Vec<Point>,
}

impl PointCloud {
    /// Builds a cloud from `(label, coords)` pairs; ids are assigned in order.
    pub fn new<I, S>(points: I) -> Result<Self, GeometryError>
    where
        I: IntoIterator<Item = (S, Vec<f64>)>,
        S: Into<String>,
    {
        let points: Vec<Point> = points
            .into_iter()
            .enumerate()
            .map(|(id, (label, coords))| Point { id, label: label.into(), coords })
            .collect();
        Self::from_points(points)
    }

    /// Builds a cloud from explicit points. Ids must form a permutation of
    /// `0..n`; the points are reordered by id.
    pub fn from_points(mut points: Vec<Point>) -> Result<Self, GeometryError> {
        points.sort_by_key(|p| p.id);
        if points.iter().enumerate().any(|(i, p)| p.id != i) {
            return Err(GeometryError::NonContiguousIds);
        }
        let dim = points.first().map_or(1, |p| p.coords.len());
        if dim == 0 {
            return Err(GeometryError::ZeroDimension);
        }
        for p in &points {
            if p.coords.len() != dim {
                return Err(GeometryError::Dimension { id: p.id, expected: dim, got: p.coords.len() });
            }
        }
        Ok(Self { dim, points })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn labels(&self) -> BTreeSet<&str> {
        self.points.iter().map(|p| p.label.as_str()).collect()
    }

    /// Serializes the cloud as XYZ. Only valid for three-dimensional clouds.
    pub fn to_xyz(&self, comment: &str) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{}", self.points.len());
        let _ = writeln!(out, "{}", comment.replace('\n', " "));
        for p in &self.points {
            let _ = write!(out, "{}", p.label);
            for c in &p.coords {
                let _ = write!(out, " {c}");
            }
            out.push('\n');
        }
        out
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> GeometryError {
    GeometryError::Parse { line, message: message.into() }
}

/// Parses an XYZ file: atom count, a comment line, then `<label> <x> <y> <z>`
/// per atom. Trailing columns are ignored. Line numbers in errors are 1-based.
pub fn parse_xyz(text: &str) -> Result<PointCloud, GeometryError> {
    let mut lines = text.lines();
    let count_line = lines.next().ok_or_else(|| parse_err(1, "missing atom count"))?;
    let count: usize = count_line
        .trim()
        .parse()
        .map_err(|_| parse_err(1, format!("malformed atom count {:?}", count_line.trim())))?;
    if lines.next().is_none() && count > 0 {
        return Err(parse_err(2, "missing comment line"));
    }
    let mut points = Vec::with_capacity(count);
    for i in 0..count {
        let lineno = i + 3;
        let line = lines
            .next()
            .ok_or_else(|| parse_err(lineno, format!("truncated file: expected {count} atoms, found {i}")))?;
        let mut fields = line.split_whitespace();
        let label = fields.next().ok_or_else(|| parse_err(lineno, "empty atom line"))?;
        let mut coords = Vec::with_capacity(3);
        for axis in ["x", "y", "z"] {
            let raw = fields.next().ok_or_else(|| parse_err(lineno, format!("missing {axis} coordinate")))?;
            let v: f64 = raw
                .parse()
                .map_err(|_| parse_err(lineno, format!("non-numeric {axis} coordinate {raw:?}")))?;
            coords.push(v);
        }
        points.push((label.to_string(), coords));
    }
    PointCloud::new(points)
}

/// Parses a CSV cloud with header `id,label,x,y,z[,...]`. The number of
/// coordinate columns fixes the dimension.
pub fn parse_csv(text: &str) -> Result<PointCloud, GeometryError> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let header = reader.headers().map_err(|e| parse_err(1, e.to_string()))?.clone();
    if header.len() < 3 || &header[0] != "id" || &header[1] != "label" {
        return Err(parse_err(1, "header must start with id,label and name at least one coordinate"));
    }
    let dim = header.len() - 2;
    let mut points = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let lineno = i + 2;
        let record = record.map_err(|e| parse_err(lineno, e.to_string()))?;
        if record.len() != dim + 2 {
            return Err(parse_err(lineno, format!("expected {} fields, found {}", dim + 2, record.len())));
        }
        let id: usize = record[0].parse().map_err(|_| parse_err(lineno, format!("bad id {:?}", &record[0])))?;
        let coords = (0..dim)
            .map(|k| {
                record[k + 2]
                    .parse::<f64>()
                    .map_err(|_| parse_err(lineno, format!("non-numeric coordinate {:?}", &record[k + 2])))
            })
            .collect::<Result<Vec<_>, _>>()?;
        points.push(Point { id, label: record[1].to_string(), coords });
    }
    PointCloud::from_points(points)
}

/// Ordered label sets, one per interacting group. Groups may overlap.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupingSpec {
    groups: Vec<BTreeSet<String>>,
}

impl GroupingSpec {
    pub fn new<I, G, S>(groups: I) -> Result<Self, GeometryError>
    where
        I: IntoIterator<Item = G>,
        G: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let groups: Vec<BTreeSet<String>> =
            groups.into_iter().map(|g| g.into_iter().map(Into::into).collect()).collect();
        if groups.len() < 2 {
            return Err(GeometryError::TooFewGroups(groups.len()));
        }
        if let Some(i) = groups.iter().position(BTreeSet::is_empty) {
            return Err(GeometryError::BadGrouping(format!("group {i} has no labels")));
        }
        Ok(Self { groups })
    }

    /// Parses `"C,B;C,H"`: groups separated by `;`, labels by `,`.
    pub fn parse(text: &str) -> Result<Self, GeometryError> {
        let groups: Vec<Vec<String>> = text
            .split(';')
            .map(|g| g.split(',').map(str::trim).filter(|s| !s.is_empty()).map(String::from).collect())
            .collect();
        Self::new(groups)
    }

    pub fn groups(&self) -> &[BTreeSet<String>] {
        &self.groups
    }

    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }
}

/// Splits a cloud into point-id sets, one per group, preserving group order.
/// A point belongs to group `i` iff its label is in that group's label set.
pub fn select_groups(cloud: &PointCloud, spec: &GroupingSpec) -> Result<Vec<Vec<usize>>, GeometryError> {
    let present = cloud.labels();
    spec.groups()
        .iter()
        .enumerate()
        .map(|(g, labels)| {
            if let Some(missing) = labels.iter().find(|l| !present.contains(l.as_str())) {
                return Err(GeometryError::UnknownLabel { group: g, label: missing.clone() });
            }
            let ids: Vec<usize> =
                cloud.points().iter().filter(|p| labels.contains(&p.label)).map(|p| p.id).collect();
            if ids.is_empty() {
                Err(GeometryError::EmptyGroup { group: g })
            } else {
                Ok(ids)
            }
        })
        .collect()
}

/// Dense symmetric matrix of pairwise distances.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl DistanceMatrix {
    /// Wraps a row-major `n x n` matrix, checking symmetry, zero diagonal
    /// and nonnegativity.
    pub fn from_rows(n: usize, entries: Vec<f64>) -> Option<Self> {
        if entries.len() != n * n {
            return None;
        }
        for i in 0..n {
            if entries[i * n + i] != 0.0 {
                return None;
            }
            for j in 0..n {
                let v = entries[i * n + j];
                if v.is_nan() || v < 0.0 || v != entries[j * n + i] {
                    return None;
                }
            }
        }
        Some(Self { n, entries })
    }

    pub fn n_points(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn max_entry(&self) -> f64 {
        self.entries.iter().copied().fold(0.0, f64::max)
    }

    /// Sorted distinct pairwise distances among `ids`, including 0.
    pub fn critical_values(&self, ids: &[usize]) -> Vec<f64> {
        let mut values = vec![0.0];
        for (k, &i) in ids.iter().enumerate() {
            for &j in &ids[k + 1..] {
                values.push(self.get(i, j));
            }
        }
        values.sort_by(f64::total_cmp);
        values.dedup();
        values
    }
}

/// Euclidean distances between all pairs of points. Rows are computed
/// independently, so the parallel and sequential builds agree bit for bit.
pub fn distance_matrix(cloud: &PointCloud) -> DistanceMatrix {
    let n = cloud.len();
    let pts = cloud.points();
    let rows = par::map_range(n, |i| {
        (0..n)
            .map(|j| {
                if i == j {
                    return 0.0;
                }
                // Accumulate in a fixed (i < j) orientation so entry (i,j) == (j,i).
                let (a, b) = if i < j { (&pts[i], &pts[j]) } else { (&pts[j], &pts[i]) };
                a.coords.iter().zip(&b.coords).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
            })
            .collect::<Vec<f64>>()
    });
    DistanceMatrix { n, entries: rows.concat() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const C2B3H5: &str = "10
closo-1,5-C2B3H5
C 0.0 0.0 1.1
C 0.0 0.0 -1.1
B 1.0 0.0 0.0
B -0.5 0.866 0.0
B -0.5 -0.866 0.0
H 0.0 0.0 2.2
H 0.0 0.0 -2.2
H 2.2 0.0 0.0
H -1.1 1.9 0.0
H -1.1 -1.9 0.0
";

    #[test]
    fn single_atom() {
        let cloud = parse_xyz("1\nc\nH 0 0 0").unwrap();
        assert_eq!(cloud.len(), 1);
        assert_eq!(cloud.points()[0].label, "H");
        assert_eq!(cloud.points()[0].coords, vec![0.0, 0.0, 0.0]);
    }

    #[test]
    fn xyz_errors_carry_line_numbers() {
        assert_eq!(
            parse_xyz("two\nc\n"),
            Err(GeometryError::Parse { line: 1, message: "malformed atom count \"two\"".into() })
        );
        match parse_xyz("2\nc\nH 0 0 0\nH 0 zero 0\n") {
            Err(GeometryError::Parse { line: 4, .. }) => {}
            other => panic!("{other:?}"),
        }
        match parse_xyz("3\nc\nH 0 0 0\n") {
            Err(GeometryError::Parse { line: 4, message }) => assert!(message.contains("truncated")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn xyz_ignores_trailing_columns_and_round_trips() {
        let cloud = parse_xyz("2\nx\nO 0.125 -1.5 3 extra 7\nH 1e-3 2 2\n").unwrap();
        let again = parse_xyz(&cloud.to_xyz("x")).unwrap();
        assert_eq!(cloud, again);
    }

    #[test]
    fn label_filtering() {
        let cloud = parse_xyz("5\n\nC 0 0 0\nC 1 0 0\nB 2 0 0\nB 3 0 0\nB 4 0 0\n").unwrap();
        let spec = GroupingSpec::new([vec!["C", "B"], vec!["C"]]).unwrap();
        let groups = select_groups(&cloud, &spec).unwrap();
        assert_eq!(groups[0].len(), 5);
        assert_eq!(groups[1], vec![0, 1]);
    }

    #[test]
    fn carborane_grouping_overlaps_on_carbons() {
        let cloud = parse_xyz(C2B3H5).unwrap();
        let groups = select_groups(&cloud, &GroupingSpec::parse("C,B;C,H").unwrap()).unwrap();
        assert_eq!((groups[0].len(), groups[1].len()), (5, 7));
        let overlap: Vec<usize> = groups[0].iter().filter(|i| groups[1].contains(i)).copied().collect();
        assert_eq!(overlap, vec![0, 1]);
        assert!(overlap.iter().all(|&i| cloud.points()[i].label == "C"));

        let full = select_groups(&cloud, &GroupingSpec::parse("C,B,H;C,B,H").unwrap()).unwrap();
        assert_eq!(full[0], (0..10).collect::<Vec<_>>());
        assert_eq!(full[0], full[1]);
    }

    #[test]
    fn grouping_errors() {
        let cloud = parse_xyz(C2B3H5).unwrap();
        assert_eq!(GroupingSpec::parse("C,B"), Err(GeometryError::TooFewGroups(1)));
        let spec = GroupingSpec::parse("C;Mg").unwrap();
        assert_eq!(
            select_groups(&cloud, &spec),
            Err(GeometryError::UnknownLabel { group: 1, label: "Mg".into() })
        );
    }

    #[test]
    fn csv_cloud() {
        let cloud = parse_csv("id,label,x,y\n1,b,1,0\n0,a,0,0\n").unwrap();
        assert_eq!(cloud.dim(), 2);
        assert_eq!(cloud.points()[0].label, "a");
        assert_eq!(parse_csv("id,label,x\n0,a,0\n2,b,1\n"), Err(GeometryError::NonContiguousIds));
        assert!(matches!(parse_csv("id,label,x\n0,a,zz\n"), Err(GeometryError::Parse { line: 2, .. })));
    }

    #[test]
    fn distances() {
        let two = PointCloud::new([("a", vec![0.0, 0.0]), ("a", vec![1.0, 0.0])]).unwrap();
        assert_eq!(distance_matrix(&two).get(0, 1), 1.0);

        let four = PointCloud::new([
            ("a", vec![0.0, 0.0]),
            ("a", vec![1.0, 0.0]),
            ("a", vec![1.0, 1.0]),
            ("a", vec![2.0, 1.0]),
        ])
        .unwrap();
        assert_eq!(distance_matrix(&four).max_entry(), 5f64.sqrt());

        let one = PointCloud::new([("a", vec![3.0])]).unwrap();
        let d = distance_matrix(&one);
        assert_eq!((d.n_points(), d.get(0, 0)), (1, 0.0));
    }

    fn cloud_strategy() -> impl Strategy<Value = PointCloud> {
        (1usize..4).prop_flat_map(|dim| {
            prop::collection::vec(prop::collection::vec(-10.0f64..10.0, dim), 1..12)
                .prop_map(|pts| PointCloud::new(pts.into_iter().map(|c| ("X", c))).unwrap())
        })
    }

    proptest! {
        #[test]
        fn distance_matrix_is_a_metric(cloud in cloud_strategy()) {
            let d = distance_matrix(&cloud);
            let n = d.n_points();
            for i in 0..n {
                prop_assert_eq!(d.get(i, i), 0.0);
                for j in 0..n {
                    prop_assert_eq!(d.get(i, j), d.get(j, i));
                    prop_assert!(d.get(i, j) >= 0.0);
                    for k in 0..n {
                        prop_assert!(d.get(i, k) <= d.get(i, j) + d.get(j, k) + 1e-12);
                    }
                }
            }
        }

        #[test]
        fn selection_is_stable(labels in prop::collection::vec(0u8..3, 1..20)) {
            let names = ["C", "B", "H"];
            let cloud = PointCloud::new(
                labels.iter().enumerate().map(|(i, &l)| (names[l as usize], vec![i as f64])),
            ).unwrap();
            let present: Vec<&str> = cloud.labels().into_iter().collect();
            let spec = GroupingSpec::new([present.clone(), present.clone()]).unwrap();
            let first = select_groups(&cloud, &spec).unwrap();
            prop_assert_eq!(&first, &select_groups(&cloud, &spec).unwrap());
            prop_assert_eq!(first[0].len(), cloud.len());
        }
    }
}
