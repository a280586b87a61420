pub mod asymptotics;
pub mod bracket;
pub mod consistency;
pub mod exactnum;
pub mod geodesic;
pub mod oracle;
pub mod par;
pub mod volume;
