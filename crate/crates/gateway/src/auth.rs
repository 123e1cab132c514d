//! Local accounts and bearer-token sessions.

use std::collections::HashMap;
use std::fmt;
use std::sync::Mutex;

use argon2::password_hash::rand_core::OsRng;
use argon2::password_hash::{PasswordHash, PasswordHasher, PasswordVerifier, SaltString};
use argon2::Argon2;
use base64::engine::general_purpose::URL_SAFE_NO_PAD;
use base64::Engine as _;
use chrono::{DateTime, Duration, Utc};
use rand::RngCore;
use serde::Serialize;

use sciarchive::editorial::{Editorial, Role, RoleGrant};
use sciarchive::ids::{JournalId, UserId};

use crate::error::ApiError;

pub const DEFAULT_TTL_HOURS: i64 = 12;

pub fn hash_password(password: &str) -> String {
    let salt = SaltString::generate(&mut OsRng);
    Argon2::default()
        .hash_password(password.as_bytes(), &salt)
        .expect("argon2 accepts any password")
        .to_string()
}

pub fn verify_password(hash: &str, password: &str) -> bool {
    PasswordHash::new(hash).is_ok_and(|h| Argon2::default().verify_password(password.as_bytes(), &h).is_ok())
}

#[derive(Clone, Serialize)]
pub struct Session {
    pub token: String,
    pub user_id: UserId,
    pub roles: Vec<RoleGrant>,
    pub expires_at: DateTime<Utc>,
}

impl Session {
    pub fn has_role(&self, journal: &JournalId, role: Role) -> bool {
        self.roles.iter().any(|g| &g.journal_id == journal && g.role == role)
    }

    /// Editor or administrator of the journal.
    pub fn is_staff(&self, journal: &JournalId) -> bool {
        self.has_role(journal, Role::Editor) || self.has_role(journal, Role::JournalAdministrator)
    }

    /// Administrator of at least one journal; may change the catalog.
    pub fn is_archive_admin(&self) -> bool {
        self.roles.iter().any(|g| g.role == Role::JournalAdministrator)
    }
}

// Tokens must never reach logs.
impl fmt::Debug for Session {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Session")
            .field("token", &"<redacted>")
            .field("user_id", &self.user_id)
            .field("roles", &self.roles)
            .field("expires_at", &self.expires_at)
            .finish()
    }
}

fn new_token() -> String {
    let mut bytes = [0u8; 16];
    rand::thread_rng().fill_bytes(&mut bytes);
    URL_SAFE_NO_PAD.encode(bytes)
}

pub struct Sessions {
    ttl: Duration,
    live: Mutex<HashMap<String, Session>>,
}

impl Default for Sessions {
    fn default() -> Self {
        Self::new(Duration::hours(DEFAULT_TTL_HOURS))
    }
}

impl Sessions {
    pub fn new(ttl: Duration) -> Self {
        Self {
            ttl,
            live: Mutex::new(HashMap::new()),
        }
    }

    pub fn login(&self, editorial: &Editorial, user: &UserId, password: &str, now: DateTime<Utc>) -> Result<Session, ApiError> {
        let denied = || ApiError::new(401, "invalid_credentials", "unknown user or wrong password");
        let u = editorial.user(user).map_err(|_| denied())?;
        let hash = u.password_hash.as_deref().ok_or_else(denied)?;
        if !verify_password(hash, password) {
            return Err(denied());
        }
        let session = Session {
            token: new_token(),
            user_id: u.user_id.clone(),
            roles: u.roles.clone(),
            expires_at: now + self.ttl,
        };
        let mut live = self.live.lock().expect("session lock");
        live.retain(|_, s| s.expires_at > now);
        live.insert(session.token.clone(), session.clone());
        Ok(session)
    }

    pub fn lookup(&self, token: &str, now: DateTime<Utc>) -> Result<Session, ApiError> {
        let mut live = self.live.lock().expect("session lock");
        match live.get(token) {
            Some(s) if s.expires_at > now => Ok(s.clone()),
            Some(_) => {
                live.remove(token);
                Err(ApiError::unauthorized())
            }
            None => Err(ApiError::unauthorized()),
        }
    }

    pub fn logout(&self, token: &str) -> bool {
        self.live.lock().expect("session lock").remove(token).is_some()
    }
}
