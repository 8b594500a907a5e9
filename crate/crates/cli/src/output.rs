use std::io::IsTerminal;

/// Bold section headings only on a terminal and without `DSRS_NO_COLOR`.
pub fn styled() -> bool {
    std::env::var_os("DSRS_NO_COLOR").is_none() && std::io::stdout().is_terminal()
}

pub fn heading(text: &str) {
    if styled() {
        println!("\x1b[1m{text}\x1b[0m");
    } else {
        println!("{text}");
    }
}

/// Delimited text table built in memory.
pub struct Table {
    writer: csv::Writer<Vec<u8>>,
}

impl Table {
    pub fn new<I, S>(delimiter: u8, header: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        let mut writer = csv::WriterBuilder::new().delimiter(delimiter).from_writer(Vec::new());
        writer.write_record(header).expect("writing to memory");
        Self { writer }
    }

    pub fn row<I, S>(&mut self, cells: I)
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.writer.write_record(cells).expect("writing to memory");
    }

    pub fn finish(self) -> String {
        let bytes = self.writer.into_inner().expect("writing to memory");
        String::from_utf8(bytes).expect("table cells are utf-8")
    }
}

pub fn sci(v: f64) -> String {
    format!("{v:.6e}")
}
