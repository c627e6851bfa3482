pub mod aosg;
pub mod batch;
pub mod interp;
pub mod lang;
pub mod model;
pub mod oracle;
pub mod pipeline;
pub mod slicer;
pub mod synth;
