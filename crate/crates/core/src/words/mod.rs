//! Free groups: reduced words, conjugacy classes as rotation-minimal cyclic
//! words, enumeration by word length, and the subshift coding whose cycles
//! are the cyclically reduced words.

mod classes;
mod word;

pub use classes::{
    class_count, class_rows, class_to_cycle, enumerate_classes, enumerate_classes_with,
    free_group_coding, ClassRow, EnumerationOptions, DEFAULT_CLASS_CAP,
};
pub use word::{
    canonical_class, letter_from_index, letter_index, reduce, CyclicWord, Word, MAX_RANK,
};
