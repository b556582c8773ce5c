/// Compressed rows: row `i` is `data[off[i]..off[i+1]]`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub(crate) struct Csr {
    pub(crate) off: Vec<u32>,
    pub(crate) data: Vec<u32>,
}

impl Csr {
    /// Builds from (row, value) pairs; values keep their input order per row.
    pub(crate) fn from_rows(rows: usize, pairs: &[(u32, u32)]) -> Self {
        let mut off = vec![0u32; rows + 1];
        for &(r, _) in pairs {
            off[r as usize + 1] += 1;
        }
        for i in 0..rows {
            off[i + 1] += off[i];
        }
        let mut fill = off.clone();
        let mut data = vec![0u32; pairs.len()];
        for &(r, v) in pairs {
            data[fill[r as usize] as usize] = v;
            fill[r as usize] += 1;
        }
        Csr { off, data }
    }

    pub(crate) fn from_lists<L: AsRef<[u32]>>(lists: &[L]) -> Self {
        let mut off = Vec::with_capacity(lists.len() + 1);
        let mut data = Vec::new();
        off.push(0);
        for l in lists {
            data.extend_from_slice(l.as_ref());
            off.push(data.len() as u32);
        }
        Csr { off, data }
    }

    pub(crate) fn rows(&self) -> usize {
        self.off.len() - 1
    }

    pub(crate) fn row(&self, i: usize) -> &[u32] {
        &self.data[self.off[i] as usize..self.off[i + 1] as usize]
    }

    pub(crate) fn start(&self, i: usize) -> usize {
        self.off[i] as usize
    }
}
