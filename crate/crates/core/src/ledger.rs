//! Energy bookkeeping. Every joule removed from a node is recorded under a
//! category so the books can be closed against residual energy each round.

use std::fmt;

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = Self::default();
        for x in iter {
            s.add(x);
        }
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Category {
    /// Position/energy report sent to the BS at network formation.
    Formation,
    /// Reception of the CH announcement (BS broadcast or CH advertisements).
    Announcement,
    /// CH advertisement transmissions (baselines only).
    Advertisement,
    /// Join requests: member tx and CH rx of info messages.
    Association,
    /// TDMA schedule broadcast by the CH.
    Tdma,
    /// Member data transmission to its CH.
    MemberData,
    /// CH reception of member data.
    ChReceive,
    Aggregation,
    /// CH transmission of the aggregated payload (to the BS or a relay).
    ChTransmit,
    /// Relay reception and forwarding of another CH's payload.
    Relay,
    /// Nodes sending data straight to the BS when no CH exists.
    Direct,
}

impl Category {
    pub const ALL: [Category; 11] = [
        Category::Formation,
        Category::Announcement,
        Category::Advertisement,
        Category::Association,
        Category::Tdma,
        Category::MemberData,
        Category::ChReceive,
        Category::Aggregation,
        Category::ChTransmit,
        Category::Relay,
        Category::Direct,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Category::Formation => "formation",
            Category::Announcement => "announcement",
            Category::Advertisement => "advertisement",
            Category::Association => "association",
            Category::Tdma => "tdma",
            Category::MemberData => "member_data",
            Category::ChReceive => "ch_receive",
            Category::Aggregation => "aggregation",
            Category::ChTransmit => "ch_transmit",
            Category::Relay => "relay",
            Category::Direct => "direct",
        }
    }

    fn index(self) -> usize {
        Category::ALL.iter().position(|c| *c == self).unwrap()
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Debits per category, in joules.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DebitBreakdown {
    sums: [CompensatedSum; 11],
}

impl DebitBreakdown {
    pub fn add(&mut self, category: Category, joules: f64) {
        self.sums[category.index()].add(joules);
    }

    pub fn get(&self, category: Category) -> f64 {
        self.sums[category.index()].value()
    }

    pub fn total(&self) -> f64 {
        self.sums.iter().map(|s| s.value()).collect::<CompensatedSum>().value()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Category, f64)> + '_ {
        Category::ALL.iter().map(|c| (*c, self.get(*c)))
    }
}
