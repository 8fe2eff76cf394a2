//! Named template files: paths `u2`..`u17`, stars, and every free tree of
//! sizes 3 to 10.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::template::{all_free_trees, path_template, star_template, TemplateTree};

/// Sizes covered by the exhaustive `sizeK/` families.
pub const FAMILY_SIZES: std::ops::RangeInclusive<usize> = 3..=10;

/// `(relative path without extension, template)` for every bundled template.
pub fn bundled_templates() -> Vec<(String, TemplateTree)> {
    let mut out = Vec::new();
    for k in 2..=17 {
        out.push((format!("u{k}"), path_template(k)));
    }
    for k in 3..=12 {
        out.push((format!("star{k}"), star_template(k)));
    }
    for k in FAMILY_SIZES {
        for (i, t) in all_free_trees(k).into_iter().enumerate() {
            out.push((format!("size{k}/tree{:03}", i + 1), t));
        }
    }
    out
}

/// Writes every bundled template as `<dir>/<name>.txt`.
pub fn write_templates(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    for (name, t) in bundled_templates() {
        let path = dir.join(format!("{name}.txt"));
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
        let file = File::create(&path).map_err(|e| Error::io(&path, e))?;
        t.write_edge_list(BufWriter::new(file))
            .map_err(|e| Error::io(&path, e))?;
        written.push(path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::template::load_template_file;

    #[test]
    fn written_templates_reload_as_trees() {
        let dir = tempfile::tempdir().unwrap();
        let files = write_templates(dir.path()).unwrap();
        let bundled = bundled_templates();
        assert_eq!(files.len(), bundled.len());
        for (path, (_, t)) in files.iter().zip(&bundled) {
            let back = load_template_file(path, None).unwrap();
            assert_eq!(&back, t);
        }
        let size9 = fs::read_dir(dir.path().join("size9")).unwrap().count();
        assert_eq!(size9, 47);
    }
}
